#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "hdclust/csv_io.hpp"
#include "hdclust/datagen.hpp"
#include "hdclust/errors.hpp"
#include "hdclust/partition.hpp"
#include "hdclust/ratio.hpp"
#include "hdclust/rng.hpp"
#include "hdclust/sampler.hpp"
#include "svg.hpp"

namespace hdclust::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string join_grid(const std::vector<Index>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(grid[i]);
  }
  return s;
}

std::string short_number(double x) {
  std::ostringstream ss;
  ss << x;
  return ss.str();
}

Index effective_n(const RunConfig& cfg, Index fallback) { return cfg.n > 0 ? cfg.n : fallback; }

void ensure_outdir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.outdir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + cfg.outdir.string() + ": " + ec.message());
}

struct CustomPrior {
  double mu0 = 0.0;
  double kappa0 = 1.0;
  double nu0 = 0.0;
  double lambda0_scale = 1.0;
};

CustomPrior read_custom_prior(const std::string& path) {
  const std::string text = read_text_file(path);
  CustomPrior out;
  bool have_nu0 = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::InvalidConfig, path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    const std::string value = line.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (value.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidConfig, path + ":" + std::to_string(line_no) + ": bad number '" + value + "'");
    }
    if (key == "mu0") {
      out.mu0 = v;
    } else if (key == "kappa0") {
      out.kappa0 = v;
    } else if (key == "nu0") {
      out.nu0 = v;
      have_nu0 = true;
    } else if (key == "lambda0_scale") {
      out.lambda0_scale = v;
    } else {
      throw Error(ErrorKind::InvalidConfig, path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!have_nu0) throw Error(ErrorKind::InvalidConfig, path + ": nu0 is required");
  return out;
}

Table make_table(std::vector<std::string> names, const std::vector<std::vector<double>>& rows) {
  Table t;
  t.names = std::move(names);
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < t.names.size(); ++c) {
      t.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return t;
}

Index column_of(const Table& t, const std::string& name) {
  const auto it = std::find(t.names.begin(), t.names.end(), name);
  if (it == t.names.end()) throw Error(ErrorKind::ParseError, "missing column '" + name + "'");
  return static_cast<Index>(it - t.names.begin());
}

// Distinct values of a column in first-appearance order.
std::vector<double> distinct(const Table& t, Index col) {
  std::vector<double> out;
  for (Index r = 0; r < t.values.rows(); ++r) {
    const double v = t.values(r, col);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

std::vector<double> column_where(const Table& t, Index col, Index key_col, double key,
                                 Index key2_col = -1, double key2 = 0.0) {
  std::vector<double> out;
  for (Index r = 0; r < t.values.rows(); ++r) {
    if (t.values(r, key_col) != key) continue;
    if (key2_col >= 0 && t.values(r, key2_col) != key2) continue;
    out.push_back(t.values(r, col));
  }
  return out;
}

std::string plot_limits(const Table& t) {
  const Index pc = column_of(t, "p");
  const std::vector<double> ps = distinct(t, pc);
  struct Spec {
    const char* term;
    const char* limit;
    const char* title;
  };
  const Spec specs[] = {{"term_gamma", "gamma_limit", "gamma term"},
                        {"term_kappa", "kappa_limit", "kappa term"},
                        {"term_det_kappa", "det_kappa_limit", "det-kappa term"},
                        {"term_det_gram", "det_gram_limit", "Gram-determinant term"},
                        {"total", "total_limit", "total log likelihood ratio"}};
  std::vector<svg::Panel> panels;
  for (const auto& s : specs) {
    svg::Panel panel;
    panel.title = s.title;
    panel.x_label = "p";
    panel.y_label = "median log value";
    svg::Series series{"median", {}, {}, "#1f5fbf"};
    const Index tc = column_of(t, s.term);
    for (double p : ps) {
      series.x.push_back(p);
      series.y.push_back(median(column_where(t, tc, pc, p)));
    }
    panel.series.push_back(std::move(series));
    const Index lc = column_of(t, s.limit);
    if (t.values.rows() > 0 && std::isfinite(t.values(0, lc))) {
      panel.ref_lines.push_back({"analytic limit", t.values(0, lc), "#c03030"});
    }
    if (std::string(s.term) == "term_det_kappa") {
      const auto it = std::find(t.names.begin(), t.names.end(), "term_det_kappa_limit_form");
      if (it != t.names.end()) {
        svg::Series lf{"limit-form value", {}, {}, "#2a9d4a"};
        const Index lfc = static_cast<Index>(it - t.names.begin());
        for (double p : ps) {
          lf.x.push_back(p);
          lf.y.push_back(median(column_where(t, lfc, pc, p)));
        }
        panel.series.push_back(std::move(lf));
      }
    }
    panels.push_back(std::move(panel));
  }
  return svg::render(panels);
}

std::string plot_projector(const Table& t) {
  svg::Panel panel;
  panel.title = "projector residual";
  panel.x_label = "p";
  panel.y_label = "residual";
  const Index pc = column_of(t, "p");
  svg::Series med{"median", {}, {}, "#1f5fbf"};
  svg::Series hi{"max", {}, {}, "#999999"};
  const Index mc = column_of(t, "median_residual");
  const Index xc = column_of(t, "max_residual");
  for (Index r = 0; r < t.values.rows(); ++r) {
    med.x.push_back(t.values(r, pc));
    med.y.push_back(t.values(r, mc));
    hi.x.push_back(t.values(r, pc));
    hi.y.push_back(t.values(r, xc));
  }
  panel.series = {med, hi};
  return svg::render({panel});
}

std::string plot_sweep(const Table& t) {
  const Index pc = column_of(t, "p");
  const Index prc = column_of(t, "prior");
  const std::vector<double> ps = distinct(t, pc);
  const char* names[] = {"robust", "naive"};
  const char* colors[] = {"#1f5fbf", "#c03030"};
  std::vector<svg::Panel> panels;
  for (const char* metric : {"degenerate_frac", "ari", "k_mode"}) {
    svg::Panel panel;
    panel.title = std::string("median ") + metric;
    panel.x_label = "p";
    panel.y_label = metric;
    const Index mc = column_of(t, metric);
    for (int prior = 0; prior < 2; ++prior) {
      svg::Series s{names[prior], {}, {}, colors[prior]};
      for (double p : ps) {
        s.x.push_back(p);
        s.y.push_back(median(column_where(t, mc, pc, p, prc, prior)));
      }
      panel.series.push_back(std::move(s));
    }
    panels.push_back(std::move(panel));
  }
  return svg::render(panels);
}

// Writes csv then renders the plot from the serialized text, so a later
// replot of the file reproduces the SVG byte for byte.
void write_with_plot(const RunConfig& cfg, const std::string& stem, const Table& table,
                     std::string (*plot)(const Table&)) {
  const std::string csv = format_csv(table, {metadata_line(cfg)});
  write_text_file(cfg.outdir / (stem + ".csv"), csv);
  write_text_file(cfg.outdir / (stem + ".svg"), plot(parse_csv(csv)));
}

void progress(const std::string& what, Index p) {
  std::cerr << what << ": p=" << p << " done\n";
}

}  // namespace

std::vector<std::string> limits_columns() {
  return {"p",           "replicate",   "term_gamma",      "term_kappa",  "term_det_kappa",
          "term_det_gram", "total",     "gamma_limit",     "kappa_limit", "det_kappa_limit",
          "total_limit", "term_det_kappa_limit_form", "det_gram_limit", "eppf", "total_posterior"};
}

std::vector<std::string> sweep_columns() {
  return {"p", "prior", "replicate", "frac_k1", "frac_kn", "degenerate_frac", "k_mode", "ari"};
}

std::vector<std::string> projector_columns() {
  return {"p", "replicates", "median_residual", "min_residual", "max_residual"};
}

void validate(const RunConfig& cfg) {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidConfig, m); };
  const bool needs_grid = cfg.command == "limits" || cfg.command == "sweep" || cfg.command == "projector" ||
                          (cfg.command == "cluster" && cfg.input.empty());
  if (cfg.command != "limits" && cfg.command != "cluster" && cfg.command != "sweep" &&
      cfg.command != "projector" && cfg.command != "replot") {
    fail("unknown command '" + cfg.command + "'");
  }
  if (needs_grid && cfg.p_grid.empty()) fail("--p-grid must not be empty");
  for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) {
    if (cfg.p_grid[i] < 2) fail("every p must be >= 2");
    if (i > 0 && cfg.p_grid[i] <= cfg.p_grid[i - 1]) fail("--p-grid must be strictly increasing");
  }
  if (cfg.command == "cluster" && cfg.input.empty() && cfg.p_grid.size() != 1) {
    fail("cluster on generated data takes a single --p-grid value");
  }
  if (cfg.replicates < 1) fail("--replicates must be >= 1");
  if (!(cfg.alpha > 0.0)) fail("--alpha must be positive");
  if (cfg.n1 < 1 || cfg.n2 < 1) fail("--n1 and --n2 must be >= 1");
  if (cfg.n < 0 || cfg.n == 1) fail("--n must be >= 2");
  if (cfg.burnin < 0 || cfg.sweeps <= cfg.burnin) fail("need --sweeps > --burnin >= 0");
  if (!(cfg.separation >= 0.0)) fail("--separation must be >= 0");
  if (cfg.init != "one" && cfg.init != "singletons") fail("--init must be one or singletons");
  const bool robust = cfg.prior == "robust";
  if (!robust && cfg.prior != "naive" && cfg.prior.rfind("custom:", 0) != 0) {
    fail("--prior must be robust, naive or custom:<file>");
  }
  if (robust || cfg.command == "sweep" || cfg.command == "limits") {
    if (!(cfg.c1 > 0.0)) fail("--c1 must be positive");
    if (!(cfg.c2 > 1.0)) fail("--c2 must exceed 1");
  }
  if (cfg.command == "replot" && cfg.input.empty()) fail("replot needs --input");
}

NiwPrior make_prior(const RunConfig& cfg, Index p) {
  try {
    if (cfg.prior == "robust") return robust_prior(p, {cfg.c1, cfg.c2});
    if (cfg.prior == "naive") return naive_prior(p);
    const CustomPrior c = read_custom_prior(cfg.prior.substr(std::string("custom:").size()));
    return NiwPrior::with_scalar_scale(Vector::Constant(p, c.mu0), c.kappa0, c.nu0, c.lambda0_scale);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io || e.kind() == ErrorKind::InvalidConfig) throw;
    throw Error(ErrorKind::InvalidConfig, std::string("prior for p=") + std::to_string(p) + ": " + e.what());
  }
}

std::string metadata_line(const RunConfig& cfg) {
  std::string s = "hdclust " + std::string(kVersion);
  s += "; command=" + cfg.command;
  s += "; p_grid=" + join_grid(cfg.p_grid);
  s += "; c1=" + short_number(cfg.c1) + "; c2=" + short_number(cfg.c2);
  s += "; alpha=" + short_number(cfg.alpha);
  s += "; n1=" + std::to_string(cfg.n1) + "; n2=" + std::to_string(cfg.n2) + "; n=" + std::to_string(cfg.n);
  s += "; replicates=" + std::to_string(cfg.replicates);
  s += "; sweeps=" + std::to_string(cfg.sweeps) + "; burnin=" + std::to_string(cfg.burnin);
  s += "; prior=" + cfg.prior + "; separation=" + short_number(cfg.separation) + "; init=" + cfg.init;
  s += "; input=" + cfg.input + "; truth=" + cfg.truth;
  s += "; seed=" + std::to_string(cfg.seed);
  s += "; generator=" + std::string(Rng::kName);
  return s;
}

void cmd_limits(const RunConfig& cfg) {
  validate(cfg);
  ensure_outdir(cfg);
  const CrpPrior crp(cfg.alpha);
  const bool robust = cfg.prior == "robust";
  const TermLimits limits = analytic_limits({cfg.c1, cfg.c2}, cfg.n1, cfg.n2);
  std::vector<int> labels(static_cast<std::size_t>(cfg.n1 + cfg.n2), 2);
  std::fill(labels.begin(), labels.begin() + cfg.n1, 1);
  const Partition part(labels);

  std::vector<std::vector<double>> rows;
  for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
    const Index p = cfg.p_grid[pi];
    const NiwPrior prior = make_prior(cfg, p);
    for (Index r = 0; r < cfg.replicates; ++r) {
      GenSpec spec;
      spec.kind = GenKind::SingleGaussian;
      spec.n = cfg.n1 + cfg.n2;
      spec.p = p;
      spec.standardize = true;
      spec.seed = derive_seed(derive_seed(cfg.seed, pi), static_cast<std::uint64_t>(r));
      const Dataset ds = generate(spec);
      const MergeRatioBreakdown b = merge_log_ratio(ds.data, part, 1, 2, prior, crp);
      const auto lim = [&](double v) { return robust ? v : kNaN; };
      rows.push_back({static_cast<double>(p), static_cast<double>(r), b.term_gamma, b.term_kappa,
                      b.term_det_kappa, b.term_det_gram, b.total_likelihood, lim(limits.gamma_limit),
                      lim(limits.kappa_limit), lim(limits.det_kappa_limit), lim(limits.total_limit),
                      b.term_det_kappa_limit_form, lim(limits.det_gram_limit), b.eppf, b.total_posterior});
    }
    progress("limits", p);
  }
  write_with_plot(cfg, "limits", make_table(limits_columns(), rows), plot_limits);
}

void cmd_projector(const RunConfig& cfg) {
  validate(cfg);
  ensure_outdir(cfg);
  const Index n = effective_n(cfg, 10);
  std::vector<std::vector<double>> rows;
  for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
    const Index p = cfg.p_grid[pi];
    std::vector<double> residuals;
    for (Index r = 0; r < cfg.replicates; ++r) {
      GenSpec spec;
      spec.kind = GenKind::SingleGaussian;
      spec.n = n;
      spec.p = p;
      spec.seed = derive_seed(derive_seed(cfg.seed, pi), static_cast<std::uint64_t>(r));
      residuals.push_back(projector_residual(generate(spec).data));
    }
    rows.push_back({static_cast<double>(p), static_cast<double>(cfg.replicates), median(residuals),
                    *std::min_element(residuals.begin(), residuals.end()),
                    *std::max_element(residuals.begin(), residuals.end())});
    progress("projector", p);
  }
  write_with_plot(cfg, "projector", make_table(projector_columns(), rows), plot_projector);
}

namespace {

struct ChainStats {
  double frac_k1 = 0.0;
  double frac_kn = 0.0;
  Index k_mode = 0;
  double ari = kNaN;
};

ChainStats chain_stats(const PosteriorSummary& s, Index n, Index burnin, const Partition* truth) {
  ChainStats out;
  double kept = 0.0;
  for (std::size_t i = static_cast<std::size_t>(burnin); i < s.k_trace.size(); ++i) {
    kept += 1.0;
    if (s.k_trace[i] == 1) out.frac_k1 += 1.0;
    if (s.k_trace[i] == n) out.frac_kn += 1.0;
  }
  out.frac_k1 /= kept;
  out.frac_kn /= kept;
  out.k_mode = s.k_mode;
  if (truth) out.ari = adjusted_rand_index(s.point_estimate, *truth);
  return out;
}

InitMode init_mode(const RunConfig& cfg) {
  return cfg.init == "singletons" ? InitMode::Singletons : InitMode::OneCluster;
}

}  // namespace

void cmd_cluster(const RunConfig& cfg) {
  validate(cfg);
  ensure_outdir(cfg);
  Matrix data;
  std::optional<Partition> truth;
  if (!cfg.input.empty()) {
    data = read_csv(cfg.input).values;
    if (data.rows() < 1 || data.cols() < 1) throw Error(ErrorKind::InvalidConfig, "input has no data");
  } else {
    GenSpec spec;
    spec.kind = GenKind::TwoClusterMixture;
    spec.n = effective_n(cfg, 50);
    spec.p = cfg.p_grid.front();
    spec.separation = cfg.separation;
    spec.seed = derive_seed(cfg.seed, 0);
    Dataset ds = generate(spec);
    data = std::move(ds.data);
    truth = std::move(ds.truth);
  }
  if (!cfg.truth.empty()) {
    const Table t = read_csv(cfg.truth);
    if (t.values.cols() != 1 || t.values.rows() != data.rows()) {
      throw Error(ErrorKind::InvalidConfig, "truth file must hold one label per data row");
    }
    std::vector<int> labels;
    for (Index i = 0; i < t.values.rows(); ++i) labels.push_back(static_cast<int>(std::lround(t.values(i, 0))));
    truth = Partition(labels);
  }

  const NiwPrior prior = make_prior(cfg, data.cols());
  ChainConfig chain{cfg.sweeps, cfg.burnin, derive_seed(cfg.seed, 1), init_mode(cfg)};
  const PosteriorSummary s = run_chain(data, prior, CrpPrior(cfg.alpha), chain);
  const ChainStats st = chain_stats(s, data.rows(), cfg.burnin, truth ? &*truth : nullptr);

  const std::string meta = metadata_line(cfg);
  Table co;
  for (Index j = 0; j < data.rows(); ++j) co.names.push_back("obs" + std::to_string(j + 1));
  co.values = s.co_clustering;
  write_csv(cfg.outdir / "co_clustering.csv", co, {meta});

  std::vector<std::vector<double>> k_rows;
  for (std::size_t i = 0; i < s.k_trace.size(); ++i) {
    k_rows.push_back({static_cast<double>(i + 1), static_cast<double>(s.k_trace[i])});
  }
  write_csv(cfg.outdir / "k_trace.csv", make_table({"sweep", "k"}, k_rows), {meta});

  Table labels;
  labels.names = {"label"};
  labels.values.resize(data.rows(), 1);
  for (Index i = 0; i < data.rows(); ++i) labels.values(i, 0) = s.point_estimate.labels()[static_cast<std::size_t>(i)];
  write_csv(cfg.outdir / "labels.csv", labels, {meta});

  std::string summary = "k_mode=" + std::to_string(st.k_mode) +
                        " k_point=" + std::to_string(s.point_estimate.k());
  if (truth) summary += " ari=" + format_number(st.ari);
  write_text_file(cfg.outdir / "summary.txt", "# " + meta + "\n" + summary + "\n");
  std::cout << summary << "\n";
}

void cmd_sweep(const RunConfig& cfg) {
  validate(cfg);
  ensure_outdir(cfg);
  const Index n = effective_n(cfg, 20);
  const CrpPrior crp(cfg.alpha);
  std::vector<std::vector<double>> rows;
  for (std::size_t pi = 0; pi < cfg.p_grid.size(); ++pi) {
    const Index p = cfg.p_grid[pi];
    const NiwPrior priors[] = {robust_prior(p, {cfg.c1, cfg.c2}), naive_prior(p)};
    for (Index r = 0; r < cfg.replicates; ++r) {
      const std::uint64_t rep_seed = derive_seed(derive_seed(cfg.seed, pi), static_cast<std::uint64_t>(r));
      GenSpec spec;
      spec.kind = GenKind::TwoClusterMixture;
      spec.n = n;
      spec.p = p;
      spec.separation = cfg.separation;
      spec.seed = rep_seed;
      const Dataset ds = generate(spec);
      for (int which = 0; which < 2; ++which) {
        ChainConfig chain{cfg.sweeps, cfg.burnin, derive_seed(rep_seed, 1 + static_cast<std::uint64_t>(which)),
                          init_mode(cfg)};
        const PosteriorSummary s = run_chain(ds.data, priors[which], crp, chain);
        const ChainStats st = chain_stats(s, n, cfg.burnin, &ds.truth);
        rows.push_back({static_cast<double>(p), static_cast<double>(which), static_cast<double>(r), st.frac_k1,
                        st.frac_kn, st.frac_k1 + st.frac_kn, static_cast<double>(st.k_mode), st.ari});
      }
    }
    progress("sweep", p);
  }
  write_with_plot(cfg, "sweep", make_table(sweep_columns(), rows), plot_sweep);
}

void cmd_replot(const RunConfig& cfg) {
  validate(cfg);
  ensure_outdir(cfg);
  const Table t = read_csv(cfg.input);
  const std::filesystem::path stem = std::filesystem::path(cfg.input).stem();
  auto has = [&](const char* name) { return std::find(t.names.begin(), t.names.end(), name) != t.names.end(); };
  std::string svg_text;
  if (has("term_gamma")) {
    svg_text = plot_limits(t);
  } else if (has("degenerate_frac")) {
    svg_text = plot_sweep(t);
  } else if (has("median_residual")) {
    svg_text = plot_projector(t);
  } else {
    throw Error(ErrorKind::InvalidConfig, "unrecognized CSV layout in " + cfg.input);
  }
  write_text_file(cfg.outdir / (stem.string() + ".svg"), svg_text);
}

int run(const RunConfig& cfg) {
  try {
    if (cfg.command == "limits") {
      cmd_limits(cfg);
    } else if (cfg.command == "cluster") {
      cmd_cluster(cfg);
    } else if (cfg.command == "sweep") {
      cmd_sweep(cfg);
    } else if (cfg.command == "projector") {
      cmd_projector(cfg);
    } else if (cfg.command == "replot") {
      cmd_replot(cfg);
    } else {
      validate(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::InvalidConfig:
      case ErrorKind::InvalidSpec:
        return kConfigError;
      case ErrorKind::Io:
      case ErrorKind::ParseError:
      case ErrorKind::RaggedRows:
        return kIoError;
      default:
        return kNumericError;
    }
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kOk;
}

}  // namespace hdclust::cli
