#include "msdc/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "msdc/error.hpp"

namespace msdc {
namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

void ModelConfig::validate() const {
    geometry.validate();
    params.validate();
    if (weight_quantum == 0) throw ConfigError("weight_quantum must be positive");
}

void to_json(nlohmann::json& j, const ModelGeometry& g) {
    j = {{"input_width", g.input_width},
         {"input_height", g.input_height},
         {"num_active", g.num_active},
         {"num_cms", g.num_cms},
         {"units_per_cm", g.units_per_cm}};
}

void from_json(const nlohmann::json& j, ModelGeometry& g) {
    reject_unknown(j, {"input_width", "input_height", "num_active", "num_cms", "units_per_cm"},
                   "geometry");
    read_opt(j, "input_width", g.input_width);
    read_opt(j, "input_height", g.input_height);
    read_opt(j, "num_active", g.num_active);
    read_opt(j, "num_cms", g.num_cms);
    read_opt(j, "units_per_cm", g.units_per_cm);
}

void to_json(nlohmann::json& j, const CsaParams& p) {
    j = {{"eta_max", p.eta_max},
         {"sigmoid_steepness", p.sigmoid_steepness},
         {"sigmoid_midpoint", p.sigmoid_midpoint},
         {"g_floor", p.g_floor},
         {"g_exponent", p.g_exponent}};
}

void from_json(const nlohmann::json& j, CsaParams& p) {
    reject_unknown(j, {"eta_max", "sigmoid_steepness", "sigmoid_midpoint", "g_floor", "g_exponent"},
                   "params");
    read_opt(j, "eta_max", p.eta_max);
    read_opt(j, "sigmoid_steepness", p.sigmoid_steepness);
    read_opt(j, "sigmoid_midpoint", p.sigmoid_midpoint);
    read_opt(j, "g_floor", p.g_floor);
    read_opt(j, "g_exponent", p.g_exponent);
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
    j = {{"geometry", c.geometry},
         {"params", c.params},
         {"weight_quantum", c.weight_quantum},
         {"seed", c.seed},
         {"ledger", c.ledger}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
    reject_unknown(j, {"geometry", "params", "weight_quantum", "seed", "ledger"}, "config");
    if (j.contains("geometry")) from_json(j.at("geometry"), c.geometry);
    if (j.contains("params")) from_json(j.at("params"), c.params);
    read_opt(j, "weight_quantum", c.weight_quantum);
    read_opt(j, "seed", c.seed);
    read_opt(j, "ledger", c.ledger);
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

ModelConfig load_model_config(const std::filesystem::path& path) {
    ModelConfig c;
    from_json(read_json_file(path), c);
    c.validate();
    return c;
}

}  // namespace msdc
