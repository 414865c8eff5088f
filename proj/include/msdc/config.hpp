#pragma once

#include <cstdint>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "msdc/csa.hpp"
#include "msdc/geometry.hpp"
#include "msdc/weight_matrix.hpp"

namespace msdc {

/// Fully resolved settings for a model and the commands that act on it.
struct ModelConfig {
    ModelGeometry geometry;
    CsaParams params;
    std::uint32_t weight_quantum = kDefaultWeightQuantum;
    std::uint64_t seed = 0;
    bool ledger = true;

    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Missing keys keep their defaults; unknown keys are rejected with ConfigError.
void to_json(nlohmann::json& j, const ModelGeometry& g);
void from_json(const nlohmann::json& j, ModelGeometry& g);
void to_json(nlohmann::json& j, const CsaParams& p);
void from_json(const nlohmann::json& j, CsaParams& p);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

/// Reads a JSON file. Throws IoError when unreadable, ConfigError when invalid.
nlohmann::json read_json_file(const std::filesystem::path& path);
ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace msdc
