// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
//
//   acceptance [--only 1,6,9] [--threads N]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "labs/commands.hpp"
#include "labs/config.hpp"
#include "labs/io.hpp"
#include "support/bspline_properties.hpp"
#include "support/sampler_checks.hpp"
#include "support/temp_dir.hpp"

using namespace lbs;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail, double seconds) {
  if (!ok) ++failures;
  std::printf("%s  %d  %s: %s (%.1fs)\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

void desk_scale(const std::set<int>& only, int threads) {
  const auto specs = read_benchmark_spec(LABS_SOURCE_DIR "/bench/desk_scale.ini");
  for (std::size_t i = 0; i < specs.size() && i < 4; ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Timer t;
    const ExperimentSpec& spec = specs[i];
    const ExperimentResult r = run_experiment(spec, threads);
    std::string detail = "mean MSE " + fmt(r.mean) + " (sd " + fmt(r.sd) + ", " + std::to_string(spec.replicates) +
                         " replicates, " + std::to_string(spec.chain.iterations) + "/" +
                         std::to_string(spec.chain.burn_in) + "/" + std::to_string(spec.chain.thin) +
                         ") vs threshold " + fmt(*spec.mse_threshold);
    if (r.reference) detail += "; published " + fmt(r.reference->mean) + " +- " + fmt(r.reference->sd);
    std::ostringstream title;
    title << to_string(spec.function) << " n=" << spec.n << " rsnr=" << spec.rsnr;
    report(id, r.passed().value_or(false), title.str(), detail, t.seconds());
  }
}

void full_scale() {
  Timer t;
  const auto specs = read_benchmark_spec(LABS_SOURCE_DIR "/bench/full_scale.ini");
  bool ok = specs.size() == 42;
  for (const auto& s : specs) {
    ok &= s.replicates == 100 && s.chain.iterations == 200000 && s.chain.burn_in == 100000 && s.chain.thin == 10;
    ok &= find_reference_mse(to_string(s.function), static_cast<int>(s.n), s.rsnr).has_value();
  }
  report(5, ok, "full-scale spec",
         "bench/full_scale.ini parses to " + std::to_string(specs.size()) +
             " experiments at 100 replicates x 200000/100000/10, each with a published reference",
         t.seconds());
}

void bspline_properties() {
  Timer t;
  const long cases = 10000;
  struct Named {
    const char* name;
    props::Report report;
  };
  const Named reports[] = {
      {"range/support", props::range_and_support(cases, 601)},
      {"integral", props::integral_identity(cases, 602)},
      {"partition of unity", props::partition_of_unity(cases, 603)},
      {"recursion", props::recursion_consistency(cases, 604)},
      {"derivative continuity", props::derivative_continuity(cases, 605)},
  };
  bool ok = true;
  std::string detail;
  for (const auto& r : reports) {
    ok &= r.report.ok();
    detail += std::string(detail.empty() ? "" : "; ") + r.name + " " + std::to_string(r.report.cases - r.report.failures) +
              "/" + std::to_string(r.report.cases);
    if (!r.report.ok()) detail += " [" + r.report.first + "]";
  }
  report(6, ok, "B-spline properties", detail, t.seconds());
}

void sampler_correctness() {
  Timer t;
  const checks::Result a = checks::reciprocity(10000, 701);
  const checks::Result b = checks::gibbs_laws(10000, 702);
  const checks::Result c = checks::prior_recovery(100000, 703);
  report(7, a.ok && b.ok && c.ok, "sampler correctness",
         "(a) " + a.detail + " | (b) " + b.detail + " | (c) " + c.detail, t.seconds());
}

void determinism() {
  Timer t;
  support::TempDir dir;
  bool ok = true;
  std::string detail;
  const auto same = [&](const std::filesystem::path& x, const std::filesystem::path& y) {
    const bool eq = read_file(x) == read_file(y);
    if (!eq) detail += (detail.empty() ? "" : "; ") + x.filename().string() + " differs";
    ok &= eq;
  };
  for (const char* run : {"r1", "r2"}) {
    std::filesystem::create_directories(dir / run);
    SimulateArgs sim;
    sim.function = TestFunction::modified_blocks;
    sim.seed = 42;
    sim.out = dir / run / "data.csv";
    cmd_simulate(sim);
    RunConfig cfg;
    cfg.hyper = published_hyperparams(TestFunction::modified_blocks);
    cfg.chain = ChainConfig{5000, 2500, 10, 42};
    cfg.trace = true;
    cmd_fit(sim.out, cfg, (dir / run / "fit").string());
    cmd_summarize(dir / run / "fit_trace.csv", (dir / run / "sum").string());
  }
  for (const char* f : {"data.csv", "data_truth.csv", "fit_curve.csv", "fit_summary.json", "fit_trace.csv",
                        "sum_curve.csv", "sum_summary.json"}) {
    same(dir / "r1" / f, dir / "r2" / f);
  }
  write_file(dir / "spec.ini",
             "[defaults]\nreplicates = 6\niterations = 2000\nburn_in = 1000\nthin = 10\n"
             "[blocks]\nfunction = blocks\nthreshold = 2\n[doppler]\nfunction = doppler\nrsnr = 5\n");
  for (int threads : {1, 2, 6}) {
    cmd_benchmark(dir / "spec.ini", dir / ("t" + std::to_string(threads) + ".csv"), threads);
    cmd_benchmark(dir / "spec.ini", dir / ("t" + std::to_string(threads) + ".json"), threads);
  }
  for (const char* ext : {".csv", ".json"}) {
    same(dir / (std::string("t1") + ext), dir / (std::string("t2") + ext));
    same(dir / (std::string("t1") + ext), dir / (std::string("t6") + ext));
  }
  if (ok) {
    detail = "simulate, fit (curve, summary, trace) and summarize byte-identical across two runs; "
             "benchmark CSV and JSON byte-identical at 1, 2 and 6 worker threads";
  }
  report(8, ok, "determinism", detail, t.seconds());
}

void delta_likelihood() {
  Timer t;
  bool ok = true;
  std::string detail;
  const ChainConfig cfg{5000, 2500, 10, 9};
  SamplerOptions desk;
  desk.move_repeats = 5;
  desk.update_all_betas = true;
  for (TestFunction f : {TestFunction::blocks, TestFunction::heavisine, TestFunction::bumps,
                         TestFunction::modified_blocks}) {
    for (const SamplerOptions& opts : {SamplerOptions{}, desk}) {
      const checks::Result r = checks::recompute_agreement(f, published_hyperparams(f), cfg, 9, opts);
      ok &= r.ok;
      detail += (detail.empty() ? "" : " | ") + r.detail;
    }
  }
  report(9, ok, "incremental vs full recompute", detail, t.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only_text;
  int threads = 0;
  app.add_option("--only", only_text, "Comma-separated criteria to run (default all)");
  app.add_option("--threads", threads, "Replicate workers for criteria 1-4 (0 = all cores)");
  CLI11_PARSE(app, argc, argv);
  std::set<int> only;
  if (!only_text.empty()) {
    for (int id : parse_int_list(only_text, "only")) only.insert(id);
  }
  const auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };

  try {
    desk_scale(only, threads);
    if (wanted(5)) full_scale();
    if (wanted(6)) bspline_properties();
    if (wanted(7)) sampler_correctness();
    if (wanted(8)) determinism();
    if (wanted(9)) delta_likelihood();
  } catch (const std::exception& e) {
    std::printf("FAIL  acceptance run aborted: %s\n", e.what());
    return 1;
  }
  return failures == 0 ? 0 : 1;
}
