#pragma once

#include <cstdint>
#include <string>

namespace gwgb::props {

struct Outcome {
    bool ok = true;
    std::string detail;  // first failure, or a short summary on success
};

// Each check builds its own random inputs from `seed`.
Outcome telescoping(std::uint64_t seed, int datasets = 50, int points = 1000);
Outcome zero_moments(std::uint64_t seed, int datasets = 20);
Outcome norm_oracle(std::uint64_t seed, int datasets = 50);
Outcome loss_curve_oracle(std::uint64_t seed, int datasets = 50);
Outcome auc_oracle(std::uint64_t seed, int sets = 100);
Outcome model_determinism(std::uint64_t seed);
Outcome hand_derived_tree();

}  // namespace gwgb::props
