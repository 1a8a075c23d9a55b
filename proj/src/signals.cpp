#include "labs/signals.hpp"

#include <cmath>
#include <numbers>

#include "labs/random.hpp"

namespace lbs {

namespace {

constexpr Scalar kPi = std::numbers::pi;

Scalar sgn(Scalar x) { return static_cast<Scalar>((x > 0) - (x < 0)); }

// Jump/peak locations shared by Blocks and Bumps.
constexpr std::array<Scalar, 11> kDjLocations{0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                                              0.44, 0.65, 0.76, 0.78, 0.81};
constexpr std::array<Scalar, 11> kBlocksHeights{4.0, -5.0, 3.0, -4.0, 5.0, -4.2,
                                                2.1, 4.3, -3.1, 2.1, -4.2};
constexpr std::array<Scalar, 11> kBumpsHeights{4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
constexpr std::array<Scalar, 11> kBumpsWidths{0.005, 0.005, 0.006, 0.01, 0.01, 0.03,
                                              0.01,  0.01,  0.005, 0.008, 0.005};

Scalar blocks(Scalar x) {
  Scalar f = 0.0;
  for (std::size_t j = 0; j < kDjLocations.size(); ++j) f += kBlocksHeights[j] * step(x - kDjLocations[j]);
  return f;
}

Scalar bumps(Scalar x) {
  Scalar f = 0.0;
  for (std::size_t j = 0; j < kDjLocations.size(); ++j)
    f += kBumpsHeights[j] * bump_kernel(x - kDjLocations[j], kBumpsWidths[j]);
  return f;
}

Scalar doppler(Scalar x) { return std::sqrt(x * (1.0 - x)) * std::sin(2.0 * kPi * 1.05 / (x + 0.05)); }

Scalar heavisine(Scalar x) { return 4.0 * std::sin(4.0 * kPi * x) - sgn(x - 0.3) - sgn(0.72 - x); }

Scalar modified_blocks(Scalar x) {
  const Scalar jumps = 4.0 * step(x - 0.1) - 5.0 * step(x - 0.13) + 5.0 * step(x - 0.25) -
                       4.2 * step(x - 0.4) + 2.1 * step(x - 0.44) + 4.3 * step(x - 0.65) -
                       4.2 * step(x - 0.81) + 2.0;
  return 0.6 / 0.92 * jumps + 0.2 + std::sin(8.0 * kPi * x);
}

Scalar modified_bumps(Scalar x) {
  return 7.0 * bump_kernel(x - 0.1, 0.005) + 5.0 * bump_kernel(x - 0.25, 0.07) +
         4.2 * bump_kernel(x - 0.4, 0.03) + 4.3 * bump_kernel(x - 0.65, 0.01) +
         5.1 * bump_kernel(x - 0.78, 0.008) + 3.1 * bump_kernel(x - 0.9, 0.1) + std::cos(4.0 * kPi * x);
}

Scalar modified_heavisine(Scalar x) {
  return 6.0 * std::sin(4.0 * kPi * x) + 7.0 * step(x - 0.1) - 7.0 * step(x - 0.18) -
         2.0 * sgn(x - 0.37) + 17.0 * bump_kernel(x - 0.5, 0.01) - 3.0 * sgn(x - 0.72) +
         10.0 * bump_kernel(x - 0.89, 0.05);
}

}  // namespace

std::string_view to_string(TestFunction f) {
  switch (f) {
    case TestFunction::bumps:
      return "bumps";
    case TestFunction::blocks:
      return "blocks";
    case TestFunction::doppler:
      return "doppler";
    case TestFunction::heavisine:
      return "heavisine";
    case TestFunction::modified_blocks:
      return "modified_blocks";
    case TestFunction::modified_bumps:
      return "modified_bumps";
    case TestFunction::modified_heavisine:
      return "modified_heavisine";
  }
  return "unknown";
}

TestFunction parse_test_function(std::string_view name) {
  for (TestFunction f : kAllTestFunctions) {
    if (to_string(f) == name) return f;
  }
  throw PreconditionError("unknown test function '" + std::string(name) +
                          "' (expected bumps, blocks, doppler, heavisine, modified_blocks, "
                          "modified_bumps or modified_heavisine)");
}

Scalar step(Scalar x) { return 0.5 * (1.0 + sgn(x)); }

Scalar bump_kernel(Scalar x, Scalar w) { return std::pow(1.0 + std::abs(x / w), -4.0); }

Scalar eval_test_function(TestFunction f, Scalar x) {
  switch (f) {
    case TestFunction::bumps:
      return bumps(x);
    case TestFunction::blocks:
      return blocks(x);
    case TestFunction::doppler:
      return doppler(x);
    case TestFunction::heavisine:
      return heavisine(x);
    case TestFunction::modified_blocks:
      return modified_blocks(x);
    case TestFunction::modified_bumps:
      return modified_bumps(x);
    case TestFunction::modified_heavisine:
      return modified_heavisine(x);
  }
  throw PreconditionError("unknown test function");
}

Vector eval_test_function(TestFunction f, const Vector& xs) {
  return xs.unaryExpr([f](Scalar x) { return eval_test_function(f, x); });
}

Vector uniform_grid(Index n) {
  require(n >= 2, "uniform_grid: need at least two points");
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = static_cast<Scalar>(i) / static_cast<Scalar>(n - 1);
  return x;
}

Scalar grid_sd(const Vector& values) {
  require(values.size() >= 1, "grid_sd: empty");
  return std::sqrt((values.array() - values.mean()).square().mean());
}

Scalar rsnr_sigma(const Vector& f_values, Scalar rsnr) {
  require(rsnr > 0, "rsnr: must be positive");
  if (std::isinf(rsnr)) return 0.0;
  return grid_sd(f_values) / rsnr;
}

Vector scaled_signal(TestFunction f, const Vector& grid, Scalar signal_sd) {
  Vector values = eval_test_function(f, grid);
  const Scalar sd = grid_sd(values);
  if (signal_sd > 0 && sd > 0) values *= signal_sd / sd;
  return values;
}

SimulatedData simulate(TestFunction f, Index n, Scalar rsnr, std::uint64_t seed, Scalar signal_sd) {
  require(n >= 2, "simulate: n must be at least 2");
  SimulatedData out;
  const Vector x = uniform_grid(n);
  out.truth = scaled_signal(f, x, signal_sd);
  out.sigma = rsnr_sigma(out.truth, rsnr);
  Vector y = out.truth;
  if (out.sigma > 0) {
    Rng rng = make_rng(seed, 0);
    for (Index i = 0; i < n; ++i) y[i] += normal(rng, 0.0, out.sigma);
  }
  out.data = Dataset(x, std::move(y), Interval{0.0, 1.0});
  return out;
}

}  // namespace lbs
