#pragma once

// Multi-seed reconstructions of the stored-set / probe scenarios: a set of
// mutually disjoint stored patterns and probes whose overlap with each stored
// pattern follows a per-probe schedule.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msdc/config.hpp"
#include "msdc/memory.hpp"
#include "msdc/oracle.hpp"

namespace msdc::experiments {

struct ProbeSpec {
    std::string label;
    /// overlaps[i] = number of pixels shared with stored item i.
    std::vector<std::uint32_t> overlaps;

    friend bool operator==(const ProbeSpec&, const ProbeSpec&) = default;
};

enum class StoreOrder { fixed, shuffled };

struct ScenarioSpec {
    std::string name = "appendix";
    ModelGeometry geometry;
    CsaParams params;
    std::uint32_t weight_quantum = kDefaultWeightQuantum;
    std::uint32_t num_stored = 6;
    std::uint64_t layout_seed = 1;
    std::vector<ProbeSpec> probes;
    std::vector<std::uint64_t> seeds;
    SelectionMode mode = SelectionMode::soft;
    StoreOrder store_order = StoreOrder::fixed;

    /// 12x12 grid, S=12, Q=24, K=8; probes I7, I8, I9; seeds 1..500.
    static ScenarioSpec appendix();
    void validate() const;
    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

void to_json(nlohmann::json& j, const ScenarioSpec& s);
/// Accepts "seeds" as an explicit list or {"first": a, "count": n}.
void from_json(const nlohmann::json& j, ScenarioSpec& s);
ScenarioSpec load_scenario_spec(const std::filesystem::path& path);

struct Corpus {
    std::vector<oracle::LabeledPattern> stored;  // I1..In
    std::vector<oracle::LabeledPattern> probes;
};

/// Deterministic layout from spec.layout_seed. Throws ConfigError when a
/// schedule cannot be met (demanded overlap exceeds S or the free pixels).
Corpus build_appendix_corpus(const ScenarioSpec& spec);

struct TrialRecord {
    std::uint64_t seed = 0;
    std::string probe;
    double familiarity = 0.0;
    double eta = 0.0;
    double max_mu = 0.0;
    Code code;
    std::vector<BeliefItem> items;  // in stored-item order
};

struct ScenarioResults {
    ScenarioSpec spec;
    Corpus corpus;
    std::vector<TrialRecord> trials;  // sorted by (seed, probe order)
};

ScenarioResults run_scenario(const ScenarioSpec& spec);

struct ItemAggregate {
    std::string probe;
    std::string item;
    double input_similarity = 0.0;
    std::size_t n_seeds = 0;
    double mean_likelihood = 0.0;
    double stddev_likelihood = 0.0;
    double mean_intersection = 0.0;
    /// Fraction of seeds in which this item's likelihood is the unique maximum.
    double top_fraction = 0.0;
};

struct ProbeSummary {
    std::string probe;
    std::size_t n_seeds = 0;
    double mean_familiarity = 0.0;
    double stddev_familiarity = 0.0;
    /// Rank correlation of input similarity vs mean code intersection.
    double spearman = 0.0;
};

std::vector<ItemAggregate> aggregate_items(const ScenarioResults& results);
std::vector<ProbeSummary> summarize_probes(const ScenarioResults& results);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

enum class ResultFormat { csv, json };
ResultFormat parse_result_format(std::string_view text);

/// csv: trials.csv, aggregate.csv, summary.csv. json: results.json.
/// Every file carries the resolved scenario spec.
std::vector<std::filesystem::path> emit_results(const ScenarioResults& results,
                                                ResultFormat format,
                                                const std::filesystem::path& out_dir);

}  // namespace msdc::experiments
