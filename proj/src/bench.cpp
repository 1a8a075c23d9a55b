#include "labs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

#include <json.hpp>

#include "labs/io.hpp"

namespace lbs {

void ExperimentSpec::validate() const {
  require(replicates >= 1, "replicates: must be at least 1");
  require(n >= 2, "n: must be at least 2");
  require(rsnr > 0, "rsnr: must be positive");
  hyper.validate();
  chain.validate();
  sampler.validate();
}

std::optional<bool> ExperimentResult::passed() const {
  if (!spec.mse_threshold) return std::nullopt;
  return mean <= *spec.mse_threshold;
}

Hyperparams published_hyperparams(TestFunction f) {
  switch (f) {
    case TestFunction::bumps:
      return Hyperparams::uniform({1}, 100.0, 0.01, 1.0, 1.0);
    case TestFunction::blocks:
      return Hyperparams::uniform({0}, 0.01, 0.01, 1.0, 1.0);
    case TestFunction::doppler:
      return Hyperparams::uniform({1, 2}, 100.0, 0.01, 1.0, 1.0);
    case TestFunction::heavisine:
      return Hyperparams::uniform({0, 2}, 0.01, 0.01, 1.0, 1.0);
    case TestFunction::modified_blocks:
      return Hyperparams::uniform({0, 2, 3}, 0.01, 0.01, 1.0, 1.0);
    case TestFunction::modified_bumps:
      return Hyperparams::uniform({1, 2}, 50.0, 0.01, 1.0, 1.0);
    case TestFunction::modified_heavisine:
      return Hyperparams::uniform({0, 1, 2, 3}, 0.01, 0.01, 5.0, 1.0);
  }
  throw PreconditionError("unknown test function");
}

Scalar mse(const Vector& truth, const Vector& estimate) {
  require(truth.size() == estimate.size(), "mse: length mismatch");
  require(truth.size() >= 1, "mse: empty input");
  return (truth - estimate).squaredNorm() / static_cast<Scalar>(truth.size());
}

void summarize_replicates(ExperimentResult& result) {
  const auto count = static_cast<Scalar>(result.mse.size());
  require(!result.mse.empty(), "summarize_replicates: no replicates");
  Scalar sum = 0.0;
  for (Scalar v : result.mse) sum += v;
  result.mean = sum / count;
  result.sd_defined = result.mse.size() > 1;
  if (!result.sd_defined) {
    result.sd = 0.0;
    return;
  }
  Scalar ss = 0.0;
  for (Scalar v : result.mse) ss += (v - result.mean) * (v - result.mean);
  result.sd = std::sqrt(ss / (count - 1.0));
}

Scalar run_replicate(const ExperimentSpec& spec, int replicate) {
  const std::uint64_t seed = spec.base_seed ^ static_cast<std::uint64_t>(replicate);
  const SimulatedData sim = simulate(spec.function, spec.n, spec.rsnr, seed, spec.signal_sd);
  ChainConfig cfg = spec.chain;
  cfg.seed = seed;
  const ChainOutput out = run_chain(sim.data, spec.hyper, cfg, spec.sampler, sim.data.x);
  return mse(sim.truth, out.curves.colwise().mean().transpose());
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  result.reference = find_reference_mse(to_string(spec.function), static_cast<int>(spec.n), spec.rsnr);
  const auto count = static_cast<std::size_t>(spec.replicates);
  result.mse.assign(count, 0.0);
  result.seconds.assign(count, 0.0);
  std::vector<std::exception_ptr> errors(count);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        result.mse[i] = run_replicate(spec, static_cast<int>(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
      result.seconds[i] = std::chrono::duration<Scalar>(std::chrono::steady_clock::now() - start).count();
    }
  };
  unsigned workers = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(count));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  summarize_replicates(result);
  return result;
}

namespace {

std::string join_degrees(const std::vector<int>& degrees, char sep) {
  std::string out;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(degrees[i]);
  }
  return out;
}

}  // namespace

std::string emit_table(const std::vector<ExperimentResult>& results, TableFormat format) {
  require(!results.empty(), "emit_table: no results");
  if (format == TableFormat::json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      nlohmann::ordered_json row;
      row["label"] = r.spec.label;
      row["function"] = std::string(to_string(r.spec.function));
      row["n"] = r.spec.n;
      row["rsnr"] = r.spec.rsnr;
      row["degrees"] = r.spec.hyper.degrees;
      row["replicates"] = r.spec.replicates;
      row["iterations"] = r.spec.chain.iterations;
      row["burn_in"] = r.spec.chain.burn_in;
      row["thin"] = r.spec.chain.thin;
      row["mean_mse"] = r.mean;
      row["sd_mse"] = r.sd;
      row["sd_defined"] = r.sd_defined;
      row["reference_mean"] = r.reference ? nlohmann::ordered_json(r.reference->mean) : nlohmann::ordered_json();
      row["reference_sd"] = r.reference ? nlohmann::ordered_json(r.reference->sd) : nlohmann::ordered_json();
      row["threshold"] = r.spec.mse_threshold ? nlohmann::ordered_json(*r.spec.mse_threshold) : nlohmann::ordered_json();
      const auto pass = r.passed();
      row["pass"] = pass ? nlohmann::ordered_json(*pass) : nlohmann::ordered_json();
      row["mse"] = r.mse;
      rows.push_back(row);
    }
    return rows.dump(2) + "\n";
  }

  std::string out =
      "label,function,n,rsnr,degrees,replicates,iterations,burn_in,thin,mean_mse,sd_mse,"
      "reference_mean,reference_sd,threshold,pass\n";
  for (const auto& r : results) {
    const auto pass = r.passed();
    out += r.spec.label + ',' + std::string(to_string(r.spec.function)) + ',' + std::to_string(r.spec.n) + ',' +
           format_double(r.spec.rsnr) + ',' + join_degrees(r.spec.hyper.degrees, ';') + ',' +
           std::to_string(r.spec.replicates) + ',' + std::to_string(r.spec.chain.iterations) + ',' +
           std::to_string(r.spec.chain.burn_in) + ',' + std::to_string(r.spec.chain.thin) + ',' +
           format_double(r.mean) + ',' + (r.sd_defined ? format_double(r.sd) : std::string("NA")) + ',' +
           (r.reference ? format_double(r.reference->mean) : std::string()) + ',' +
           (r.reference ? format_double(r.reference->sd) : std::string()) + ',' +
           (r.spec.mse_threshold ? format_double(*r.spec.mse_threshold) : std::string()) + ',' +
           (pass ? (*pass ? "pass" : "fail") : "") + '\n';
  }
  return out;
}

}  // namespace lbs
