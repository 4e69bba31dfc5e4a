#include <CLI11.hpp>

#include <string>

#include "commands.hpp"

int main(int argc, char** argv) {
  using hdclust::cli::RunConfig;
  RunConfig cfg;
  std::string outdir = ".";

  CLI::App app{"High-dimensional NIW mixture clustering: merge-ratio limits, sampler, projector checks"};
  app.set_version_flag("--version", hdclust::cli::kVersion);
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p-grid", cfg.p_grid, "Strictly increasing list of dimensions")->delimiter(',');
    sub->add_option("--c1", cfg.c1, "Robust prior: kappa0 = c1 sqrt(p)");
    sub->add_option("--c2", cfg.c2, "Robust prior: nu0 = c2 p (c2 > 1)");
    sub->add_option("--alpha", cfg.alpha, "CRP concentration");
    sub->add_option("--n1", cfg.n1, "Size of the first cluster in ratio experiments");
    sub->add_option("--n2", cfg.n2, "Size of the second cluster in ratio experiments");
    sub->add_option("--n", cfg.n, "Number of observations for generated data");
    sub->add_option("--replicates", cfg.replicates, "Replicates (or chains) per grid point");
    sub->add_option("--sweeps", cfg.sweeps, "Gibbs sweeps including burn-in");
    sub->add_option("--burnin", cfg.burnin, "Discarded initial sweeps");
    sub->add_option("--seed", cfg.seed, "Base RNG seed");
    sub->add_option("--input", cfg.input, "Input CSV");
    sub->add_option("--truth", cfg.truth, "CSV with one true label per input row");
    sub->add_option("--outdir", outdir, "Output directory");
    sub->add_option("--prior", cfg.prior, "robust | naive | custom:<file>");
    sub->add_option("--separation", cfg.separation, "Distance between component means per coordinate");
    sub->add_option("--init", cfg.init, "Sampler start: one | singletons");
  };

  const char* commands[][2] = {
      {"limits", "Merge-ratio terms against their analytic limits over a p grid"},
      {"cluster", "Run the collapsed Gibbs sampler on CSV or generated data"},
      {"sweep", "Sampler under robust and naive priors across a p grid"},
      {"projector", "Projector residual medians across a p grid"},
      {"replot", "Regenerate the SVG for a CSV written by limits, sweep or projector"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    add_common(sub);
    sub->callback([&cfg, name = std::string(c[0])] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return hdclust::cli::kConfigError;
  }
  cfg.outdir = outdir;
  return hdclust::cli::run(cfg);
}
