// labs: simulate benchmark data, fit the LABS model, run benchmark specs and
// summarise traces.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "labs/commands.hpp"
#include "labs/io.hpp"

namespace {

struct FitFlags {
  std::string data;
  std::string config;
  std::string out = "labs";
  std::optional<std::uint64_t> seed;
  std::optional<long> iterations, burn_in, thin;
  std::optional<std::string> degrees;
  std::optional<long> grid;
  bool prior_only = false;
  bool full_recompute = false;
  bool trace = false;
};

lbs::RunConfig resolve(const FitFlags& f) {
  lbs::RunConfig cfg = f.config.empty() ? lbs::RunConfig{} : lbs::read_run_config(f.config);
  if (f.seed) cfg.chain.seed = *f.seed;
  if (f.iterations) cfg.chain.iterations = *f.iterations;
  if (f.burn_in) cfg.chain.burn_in = *f.burn_in;
  if (f.thin) cfg.chain.thin = *f.thin;
  if (f.degrees) lbs::set_degrees(cfg.hyper, lbs::parse_int_list(*f.degrees, "degrees"));
  if (f.grid) cfg.grid = *f.grid;
  if (f.prior_only) cfg.sampler.prior_only = true;
  if (f.full_recompute) cfg.sampler.full_recompute = true;
  if (f.trace) cfg.trace = true;
  cfg.validate();
  return cfg;
}

void report(const lbs::Paths& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levy adaptive B-spline regression"};
  app.require_subcommand(1);

  lbs::SimulateArgs sim;
  std::string sim_function = "blocks";
  std::string sim_out = "data.csv";
  auto* simulate = app.add_subcommand("simulate", "Noisy sample of a test signal plus its noiseless truth");
  simulate->add_option("--function", sim_function, "bumps, blocks, doppler, heavisine, modified_blocks, "
                                                    "modified_bumps or modified_heavisine")
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--rsnr", sim.rsnr, "Root signal-to-noise ratio")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--signal-sd", sim.signal_sd, "Rescale the signal to this sd; 0 keeps the raw formula")
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "Dataset CSV; the truth goes to <stem>_truth.csv")->capture_default_str();

  FitFlags fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a dataset (x,y CSV) by reversible-jump MCMC");
  fit_cmd->add_option("data", fit.data, "Dataset CSV with header x,y")->required();
  fit_cmd->add_option("--config", fit.config, "key = value configuration (see default-config)");
  fit_cmd->add_option("--out", fit.out, "Output prefix")->capture_default_str();
  fit_cmd->add_option("--seed", fit.seed, "Chain seed (default 1)");
  fit_cmd->add_option("--iterations", fit.iterations, "Sweeps (default 50000)");
  fit_cmd->add_option("--burn-in", fit.burn_in, "Discarded sweeps (default 25000)");
  fit_cmd->add_option("--thin", fit.thin, "Keep every thin-th sweep after burn-in (default 10)");
  fit_cmd->add_option("--degrees", fit.degrees, "B-spline degrees, e.g. 0,1,2 (default)");
  fit_cmd->add_option("--grid", fit.grid, "Output grid points; 0 = data abscissae (default)");
  fit_cmd->add_flag("--prior-only", fit.prior_only, "Ignore the likelihood and sample the prior");
  fit_cmd->add_flag("--full-recompute", fit.full_recompute, "Exact likelihood for every ratio (verification)");
  fit_cmd->add_flag("--trace", fit.trace, "Also write <prefix>_trace.csv");

  std::string bench_spec;
  std::string bench_out = "bench.csv";
  int threads = 0;
  auto* bench = app.add_subcommand("benchmark", "Run a benchmark spec and write the MSE table");
  bench->add_option("spec", bench_spec, "Benchmark spec (INI sections, one per experiment)")->required();
  bench->add_option("--out", bench_out, "Table path; .json for JSON, otherwise CSV")->capture_default_str();
  bench->add_option("--threads", threads, "Worker threads; 0 = hardware concurrency")->capture_default_str();

  std::string trace_in;
  std::string sum_out = "labs";
  double lower = 0.025, upper = 0.975;
  auto* summarize = app.add_subcommand("summarize", "Recompute the summary and curve from a trace CSV");
  summarize->add_option("trace", trace_in, "Trace CSV written by fit --trace")->required();
  summarize->add_option("--out", sum_out, "Output prefix")->capture_default_str();
  summarize->add_option("--lower", lower, "Lower band level")->capture_default_str();
  summarize->add_option("--upper", upper, "Upper band level")->capture_default_str();

  std::string cfg_out;
  auto* defaults = app.add_subcommand("default-config", "Print the default fit configuration");
  defaults->add_option("--out", cfg_out, "Write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim.function = lbs::parse_test_function(sim_function);
      sim.out = sim_out;
      report(lbs::cmd_simulate(sim));
    } else if (*fit_cmd) {
      report(lbs::cmd_fit(fit.data, resolve(fit), fit.out));
    } else if (*bench) {
      report(lbs::cmd_benchmark(bench_spec, bench_out, threads));
    } else if (*summarize) {
      report(lbs::cmd_summarize(trace_in, sum_out, lower, upper));
    } else if (*defaults) {
      if (cfg_out.empty()) {
        std::cout << lbs::default_config_text();
      } else {
        lbs::write_file(cfg_out, lbs::default_config_text());
        report({cfg_out});
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "labs: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
