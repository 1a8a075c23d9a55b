#pragma once

// Replicate-level benchmark harness. Each replicate i simulates a dataset and
// runs a chain, both seeded from base_seed XOR i, and scores the posterior
// mean curve against the noiseless signal on the sample grid.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "labs/reference_mse.hpp"
#include "labs/sampler.hpp"
#include "labs/signals.hpp"

namespace lbs {

struct ExperimentSpec {
  std::string label;
  TestFunction function = TestFunction::blocks;
  Index n = 128;
  Scalar rsnr = 3.0;
  int replicates = 10;
  Hyperparams hyper;
  ChainConfig chain;
  SamplerOptions sampler;
  std::uint64_t base_seed = 1;
  Scalar signal_sd = kDefaultSignalSd;
  std::optional<Scalar> mse_threshold;

  void validate() const;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<Scalar> mse;
  Scalar mean = 0.0;
  Scalar sd = 0.0;         ///< Sample standard deviation; 0 when only one replicate.
  bool sd_defined = true;  ///< False for a single replicate.
  std::vector<Scalar> seconds;
  std::optional<ReferenceMse> reference;

  std::optional<bool> passed() const;
};

enum class TableFormat { csv, json };

/// Hyperparameters used for each test function in the published simulations.
Hyperparams published_hyperparams(TestFunction f);

/// (1/n) sum (truth - estimate)^2.
Scalar mse(const Vector& truth, const Vector& estimate);

/// Mean and sample standard deviation of per-replicate values.
void summarize_replicates(ExperimentResult& result);

/// MSE of a single replicate.
Scalar run_replicate(const ExperimentSpec& spec, int replicate);

/// Runs all replicates on up to `threads` workers (0 = hardware concurrency);
/// results are ordered by replicate index whatever the thread count.
ExperimentResult run_experiment(const ExperimentSpec& spec, int threads = 0);

std::string emit_table(const std::vector<ExperimentResult>& results, TableFormat format);

}  // namespace lbs
