#pragma once

// Text configuration. A run configuration is a flat `key = value` document;
// a benchmark specification is the same syntax split into `[label]`
// sections, one per experiment, with an optional `[defaults]` section.
// Lines starting with '#' are comments.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "labs/bench.hpp"

namespace lbs {

/// Malformed or invalid configuration; the message names the source, line
/// and field.
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

struct RunConfig {
  Hyperparams hyper;
  ChainConfig chain;
  SamplerOptions sampler;
  Index grid = 0;  ///< Points in the output grid; 0 means the sorted data abscissae.
  Scalar lower = 0.025;
  Scalar upper = 0.975;
  bool trace = false;  ///< Also write the retained-sample trace.

  void validate() const;
};

RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
RunConfig read_run_config(const std::filesystem::path& path);
std::string write_run_config(const RunConfig& cfg);
/// The default configuration with every key present and commented.
std::string default_config_text();

/// Replaces the degree set, broadcasting the first gamma shape and rate when
/// the per-degree lists no longer match.
void set_degrees(Hyperparams& hyper, std::vector<int> degrees);

/// "0,1,2" -> {0, 1, 2}; throws ConfigError naming `field`.
std::vector<int> parse_int_list(std::string_view text, const std::string& field);

/// Experiments in file order. Each section starts from the published
/// hyperparameters of its `function` and the `[defaults]` chain settings.
std::vector<ExperimentSpec> parse_benchmark_spec(std::string_view text, const std::string& source = "<spec>");
std::vector<ExperimentSpec> read_benchmark_spec(const std::filesystem::path& path);

}  // namespace lbs
