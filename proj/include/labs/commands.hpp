#pragma once

// Entry points behind the `labs` command-line tool. Each command reads its
// inputs, writes its outputs and returns the paths written; errors are
// thrown and turned into a nonzero exit status by the caller.

#include <filesystem>
#include <vector>

#include "labs/config.hpp"

namespace lbs {

using Paths = std::vector<std::filesystem::path>;

struct SimulateArgs {
  TestFunction function = TestFunction::blocks;
  Index n = 128;
  Scalar rsnr = 3.0;
  std::uint64_t seed = 1;
  Scalar signal_sd = kDefaultSignalSd;
  std::filesystem::path out = "data.csv";
};

/// Writes the noisy dataset to `out` and the noiseless signal to
/// `<stem>_truth<ext>` beside it.
Paths cmd_simulate(const SimulateArgs& args);
std::filesystem::path truth_path(const std::filesystem::path& out);

/// Writes `<prefix>_curve.csv`, `<prefix>_summary.json` and, when
/// cfg.trace is set, `<prefix>_trace.csv`.
Paths cmd_fit(const std::filesystem::path& data_path, const RunConfig& cfg, const std::string& out_prefix);

/// Runs every experiment of a benchmark spec and writes the table; the format
/// follows the extension of `out` (.json, otherwise CSV).
Paths cmd_benchmark(const std::filesystem::path& spec_path, const std::filesystem::path& out, int threads = 0);

/// Recomputes `<prefix>_summary.json` and `<prefix>_curve.csv` from a trace.
Paths cmd_summarize(const std::filesystem::path& trace_path, const std::string& out_prefix, Scalar lower = 0.025,
                    Scalar upper = 0.975);

/// Output grid for a fit: the sorted abscissae, or `points` equally spaced
/// over the data domain.
Vector fit_grid(const Dataset& data, Index points);

}  // namespace lbs
