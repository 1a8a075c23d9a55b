#include "labs/commands.hpp"

#include <algorithm>

#include "labs/io.hpp"

namespace lbs {

namespace {

std::vector<std::pair<std::string, std::string>> config_pairs(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  const std::string text = write_run_config(cfg);
  std::size_t start = 0;
  while (start < text.size()) {
    const auto end = text.find('\n', start);
    const std::string line = text.substr(start, end - start);
    const auto eq = line.find(" = ");
    out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    start = end + 1;
  }
  return out;
}

}  // namespace

std::filesystem::path truth_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p.replace_filename(out.stem().string() + "_truth" + out.extension().string());
  return p;
}

Paths cmd_simulate(const SimulateArgs& args) {
  const SimulatedData sim = simulate(args.function, args.n, args.rsnr, args.seed, args.signal_sd);
  const auto truth = truth_path(args.out);
  write_file(args.out, dataset_csv(sim.data));
  write_file(truth, truth_csv(sim.data.x, sim.truth));
  return {args.out, truth};
}

Vector fit_grid(const Dataset& data, Index points) {
  if (points == 0) {
    Vector x = data.x;
    std::sort(x.begin(), x.end());
    return x;
  }
  require(points >= 2, "grid: must be 0 or at least 2");
  return Vector::LinSpaced(points, data.domain.lo, data.domain.hi);
}

Paths cmd_fit(const std::filesystem::path& data_path, const RunConfig& cfg, const std::string& out_prefix) {
  cfg.validate();
  const Dataset data = parse_dataset(data_path);
  ChainOutput out;
  try {
    out = run_chain(data, cfg.hyper, cfg.chain, cfg.sampler, fit_grid(data, cfg.grid));
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(data_path.string() + ": " + e.what() +
                              "; the coefficient prior scale is half the range of y, so a constant response "
                              "cannot be fitted (check the y column, or add the constant as a known offset)");
  }
  const PosteriorCurve curve = posterior_curve(out, cfg.lower, cfg.upper);
  Paths written{out_prefix + "_curve.csv", out_prefix + "_summary.json"};
  write_file(written[0], curve_csv(curve, cfg.lower, cfg.upper));
  write_file(written[1], summary_json(trace_from_output(out), out.acceptance, config_pairs(cfg)));
  if (cfg.trace) {
    written.emplace_back(out_prefix + "_trace.csv");
    write_file(written.back(), trace_csv(out));
  }
  return written;
}

Paths cmd_benchmark(const std::filesystem::path& spec_path, const std::filesystem::path& out, int threads) {
  const auto specs = read_benchmark_spec(spec_path);
  std::vector<ExperimentResult> results;
  for (const auto& spec : specs) results.push_back(run_experiment(spec, threads));
  const TableFormat format = out.extension() == ".json" ? TableFormat::json : TableFormat::csv;
  write_file(out, emit_table(results, format));
  return {out};
}

Paths cmd_summarize(const std::filesystem::path& trace_path, const std::string& out_prefix, Scalar lower,
                    Scalar upper) {
  require(lower > 0 && lower < upper && upper < 1, "quantiles: need 0 < lower < upper < 1");
  const Trace trace = parse_trace(trace_path);
  const PosteriorCurve curve = posterior_curve(trace.grid, trace.curves, lower, upper);
  Paths written{out_prefix + "_curve.csv", out_prefix + "_summary.json"};
  write_file(written[0], curve_csv(curve, lower, upper));
  write_file(written[1], summary_json(trace, {}, {{"source", trace_path.filename().string()}}));
  return written;
}

}  // namespace lbs
