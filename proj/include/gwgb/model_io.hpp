#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "gwgb/boosting.hpp"

namespace gwgb {

// Bumped whenever the model layout changes; other versions are rejected.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json config_to_json(const BoostConfig& config);
BoostConfig config_from_json(const nlohmann::json& j);

/// Model document: format_version, task, feature_names, label_name,
/// label_order (classification), f0, nu, config and per stage the full node
/// list (id, parent, depth, count, split, children, mean, delta, norm) plus
/// m_terms. Simplex vertices and the wavelet order are re-derived on load.
/// Doubles are written in shortest round-trip form, so a reloaded model
/// predicts bit-identically. The root norm (+inf) is stored as null.
nlohmann::json ensemble_to_json(const Ensemble& ensemble);

// Validates structure and version; throws ModelError.
Ensemble ensemble_from_json(const nlohmann::json& j);

std::string serialize_model(const Ensemble& ensemble);
Ensemble parse_model(std::string_view text);

void save_model(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_model(const std::filesystem::path& path);

}  // namespace gwgb
