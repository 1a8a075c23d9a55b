#pragma once

// Synthetic regression benchmarks: the four Donoho-Johnstone test signals
// and three piecewise-smooth variants with jumps and peaks, plus noisy
// samples at a prescribed root signal-to-noise ratio.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "labs/model.hpp"

namespace lbs {

enum class TestFunction { bumps, blocks, doppler, heavisine, modified_blocks, modified_bumps, modified_heavisine };

inline constexpr std::array<TestFunction, 7> kAllTestFunctions{
    TestFunction::bumps,           TestFunction::blocks,         TestFunction::doppler,
    TestFunction::heavisine,       TestFunction::modified_blocks, TestFunction::modified_bumps,
    TestFunction::modified_heavisine};

/// Standard deviation the simulated signals are rescaled to before noise is
/// added (the Donoho-Johnstone convention).
inline constexpr Scalar kDefaultSignalSd = 7.0;

std::string_view to_string(TestFunction f);
/// Throws PreconditionError for an unknown name.
TestFunction parse_test_function(std::string_view name);

/// (1 + sgn(x)) / 2: 0 left of zero, 1/2 at zero, 1 right of zero.
Scalar step(Scalar x);
/// Bump kernel (1 + |x / w|)^-4.
Scalar bump_kernel(Scalar x, Scalar w);

/// Closed-form value of the unscaled test function at x in [0, 1].
Scalar eval_test_function(TestFunction f, Scalar x);
Vector eval_test_function(TestFunction f, const Vector& xs);

/// x_i = (i - 1)/(n - 1), i = 1..n.
Vector uniform_grid(Index n);

/// Population standard deviation of `values` (grid average of squared deviations).
Scalar grid_sd(const Vector& values);

/// Noise level sd(f)/rsnr; an infinite rsnr gives zero.
Scalar rsnr_sigma(const Vector& f_values, Scalar rsnr);

/// f on the grid, multiplied so its grid sd equals `signal_sd`. A
/// non-positive `signal_sd` (or a constant f) leaves the values unscaled.
Vector scaled_signal(TestFunction f, const Vector& grid, Scalar signal_sd = kDefaultSignalSd);

struct SimulatedData {
  Dataset data;
  Vector truth;  ///< Noiseless signal at data.x.
  Scalar sigma = 0.0;
};

/// Noisy sample y_i = f(x_i) + N(0, sigma^2) on the uniform grid, with sigma
/// from rsnr_sigma. Deterministic in `seed`.
SimulatedData simulate(TestFunction f, Index n, Scalar rsnr, std::uint64_t seed,
                       Scalar signal_sd = kDefaultSignalSd);

inline Dataset generate_dataset(TestFunction f, Index n, Scalar rsnr, std::uint64_t seed,
                                Scalar signal_sd = kDefaultSignalSd) {
  return simulate(f, n, rsnr, seed, signal_sd).data;
}

}  // namespace lbs
