#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msdc/csa.hpp"
#include "msdc/geometry.hpp"

namespace msdc::bench {

struct BenchConfig {
    ModelGeometry geometry;
    CsaParams params;
    std::vector<std::uint64_t> checkpoints{1, 10, 100, 1000, 5000};
    std::uint32_t trials_per_checkpoint = 301;
    std::uint64_t seed = 0;
};

struct LatencyStats {
    double median_ns = 0.0;
    double p95_ns = 0.0;
};

struct Checkpoint {
    std::uint64_t stored = 0;
    LatencyStats store;
    LatencyStats retrieve;
    OpCounter store_ops;
    OpCounter retrieve_ops;
    double weight_density = 0.0;
};

struct ScalingReport {
    BenchConfig config;
    std::vector<Checkpoint> checkpoints;

    [[nodiscard]] bool op_counts_equal() const noexcept;
};

/// Expected per-store operation count for a geometry.
OpCounter expected_store_ops(const ModelGeometry& geometry) noexcept;

/// Grows one model through every checkpoint, snapshotting it at each, then
/// times store and hard retrieval of fresh patterns against every snapshot in
/// interleaved rounds. Throws ConfigError when checkpoints are not strictly
/// ascending or the input space cannot supply enough distinct patterns.
ScalingReport run_scaling_bench(const BenchConfig& config);

nlohmann::json to_json(const ScalingReport& report);
/// Checks a report document against the documented schema; returns problems found.
std::vector<std::string> validate_report_json(const nlohmann::json& doc);

}  // namespace msdc::bench
