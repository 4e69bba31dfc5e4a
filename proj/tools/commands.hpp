#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hdclust/matrix_core.hpp"
#include "hdclust/niw.hpp"

namespace hdclust::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kIoError = 4 };

struct RunConfig {
  std::string command;
  std::vector<Index> p_grid;
  double c1 = 1.0;
  double c2 = 2.0;
  double alpha = 1.0;
  Index n1 = 1;
  Index n2 = 1;
  Index n = 0;  // 0 picks the per-command default
  Index replicates = 20;
  Index sweeps = 600;
  Index burnin = 100;
  std::uint64_t seed = 1;
  std::string input;
  std::string truth;
  std::filesystem::path outdir = ".";
  std::string prior = "robust";  // robust | naive | custom:<file>
  double separation = 2.0;
  std::string init = "one";  // one | singletons
};

// Throws Error(InvalidConfig) describing the first problem found.
void validate(const RunConfig& cfg);

// Prior for dimension p according to cfg.prior.
NiwPrior make_prior(const RunConfig& cfg, Index p);

// Metadata comment placed at the top of every CSV.
std::string metadata_line(const RunConfig& cfg);

// Each writes its files into cfg.outdir. Errors surface as hdclust::Error.
void cmd_limits(const RunConfig& cfg);
void cmd_cluster(const RunConfig& cfg);
void cmd_sweep(const RunConfig& cfg);
void cmd_projector(const RunConfig& cfg);
// Regenerates the SVG belonging to a CSV written by limits, sweep or projector.
void cmd_replot(const RunConfig& cfg);

// Runs the configured command and maps errors to exit codes, reporting on stderr.
int run(const RunConfig& cfg);

// Column layout helpers shared with the tests.
std::vector<std::string> limits_columns();
std::vector<std::string> sweep_columns();
std::vector<std::string> projector_columns();

}  // namespace hdclust::cli
