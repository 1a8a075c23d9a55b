#pragma once

// Published LABS mean squared errors (mean and standard deviation over 100
// replicate datasets, 200k sweeps with 100k burn-in, thinning 10), keyed by
// test function, sample size and RSNR. Used only as reference columns in
// benchmark tables.

#include <array>
#include <optional>
#include <string_view>

namespace lbs {

struct ReferenceMse {
  std::string_view function;
  int n;
  double rsnr;
  double mean;
  double sd;
};

inline constexpr std::array<ReferenceMse, 42> kReferenceMse{{
    // Simulation 1, n = 128
    {"bumps", 128, 3, 2.589, 0.5908},
    {"bumps", 128, 5, 0.837, 0.3124},
    {"bumps", 128, 10, 0.246, 0.0683},
    {"blocks", 128, 3, 1.305, 0.5272},
    {"blocks", 128, 5, 0.365, 0.1645},
    {"blocks", 128, 10, 0.072, 0.0293},
    {"doppler", 128, 3, 2.273, 0.568},
    {"doppler", 128, 5, 0.848, 0.2521},
    {"doppler", 128, 10, 0.234, 0.0551},
    {"heavisine", 128, 3, 0.897, 0.242},
    {"heavisine", 128, 5, 0.413, 0.1492},
    {"heavisine", 128, 10, 0.103, 0.0406},
    // Simulation 1, n = 512
    {"bumps", 512, 3, 1.371, 0.6845},
    {"bumps", 512, 5, 0.619, 0.1769},
    {"bumps", 512, 10, 0.341, 0.1905},
    {"blocks", 512, 3, 0.363, 0.1391},
    {"blocks", 512, 5, 0.113, 0.0562},
    {"blocks", 512, 10, 0.021, 0.009},
    {"doppler", 512, 3, 1.243, 0.2135},
    {"doppler", 512, 5, 0.66, 0.1141},
    {"doppler", 512, 10, 0.343, 0.0843},
    {"heavisine", 512, 3, 0.291, 0.1185},
    {"heavisine", 512, 5, 0.103, 0.0508},
    {"heavisine", 512, 10, 0.031, 0.0128},
    // Simulation 2, n = 128
    {"modified_blocks", 128, 3, 1.868, 0.5982},
    {"modified_blocks", 128, 5, 0.691, 0.2022},
    {"modified_blocks", 128, 10, 0.162, 0.044},
    {"modified_bumps", 128, 3, 2.01, 0.6006},
    {"modified_bumps", 128, 5, 0.803, 0.1491},
    {"modified_bumps", 128, 10, 0.248, 0.0457},
    {"modified_heavisine", 128, 3, 1.589, 0.5081},
    {"modified_heavisine", 128, 5, 0.635, 0.1727},
    {"modified_heavisine", 128, 10, 0.172, 0.0472},
    // Simulation 2, n = 512
    {"modified_blocks", 512, 3, 0.583, 0.1718},
    {"modified_blocks", 512, 5, 0.234, 0.0696},
    {"modified_blocks", 512, 10, 0.071, 0.0325},
    {"modified_bumps", 512, 3, 0.919, 0.1397},
    {"modified_bumps", 512, 5, 0.46, 0.0867},
    {"modified_bumps", 512, 10, 0.194, 0.0443},
    {"modified_heavisine", 512, 3, 0.576, 0.146},
    {"modified_heavisine", 512, 5, 0.236, 0.0575},
    {"modified_heavisine", 512, 10, 0.078, 0.024},
}};

inline std::optional<ReferenceMse> find_reference_mse(std::string_view function, int n, double rsnr) {
  for (const auto& r : kReferenceMse) {
    if (r.function == function && r.n == n && r.rsnr == rsnr) return r;
  }
  return std::nullopt;
}

}  // namespace lbs
