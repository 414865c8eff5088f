#include "msdc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "msdc/config.hpp"
#include "msdc/error.hpp"
#include "msdc/memory.hpp"

namespace msdc::bench {
namespace {

using Clock = std::chrono::steady_clock;

// log C(n, k) via lgamma.
double log_binomial(double n, double k) {
    return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

class PatternSource {
public:
    PatternSource(const ModelGeometry& geometry, std::uint64_t seed)
        : geometry_(geometry), rng_(seed), pool_(geometry.num_pixels()) {
        for (std::uint32_t i = 0; i < pool_.size(); ++i) pool_[i] = i;
    }

    /// A pattern never returned before.
    InputPattern next() {
        for (;;) {
            // Partial Fisher-Yates over the pixel pool.
            for (std::size_t i = 0; i < geometry_.num_active; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, pool_.size() - 1);
                std::swap(pool_[i], pool_[pick(rng_)]);
            }
            InputPattern p({pool_.begin(), pool_.begin() + geometry_.num_active});
            auto key = std::vector<std::uint32_t>(p.active().begin(), p.active().end());
            if (seen_.insert(std::move(key)).second) return p;
        }
    }

private:
    ModelGeometry geometry_;
    Rng rng_;
    std::vector<std::uint32_t> pool_;
    std::set<std::vector<std::uint32_t>> seen_;
};

LatencyStats summarize(std::vector<double> ns) {
    LatencyStats s;
    if (ns.empty()) return s;
    std::sort(ns.begin(), ns.end());
    const auto n = ns.size();
    s.median_ns = n % 2 ? ns[n / 2] : 0.5 * (ns[n / 2 - 1] + ns[n / 2]);
    const auto idx = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n))) - 1;
    s.p95_ns = ns[std::min(idx, n - 1)];
    return s;
}

nlohmann::json ops_json(const OpCounter& ops) {
    return {{"weight_reads", ops.weight_reads},     {"normalizations", ops.normalizations},
            {"max_comparisons", ops.max_comparisons}, {"sigmoid_evals", ops.sigmoid_evals},
            {"rho_divisions", ops.rho_divisions},   {"cumulative_steps", ops.cumulative_steps},
            {"rng_draws", ops.rng_draws},           {"total", ops.total()}};
}

}  // namespace

bool ScalingReport::op_counts_equal() const noexcept {
    for (const auto& c : checkpoints) {
        if (!(c.store_ops == checkpoints.front().store_ops) ||
            !(c.retrieve_ops == checkpoints.front().retrieve_ops)) {
            return false;
        }
    }
    return true;
}

OpCounter expected_store_ops(const ModelGeometry& g) noexcept {
    const std::uint64_t units = g.num_units();
    OpCounter ops;
    ops.weight_reads = units * g.num_active;
    ops.normalizations = units;
    ops.max_comparisons = units;
    ops.sigmoid_evals = units;
    ops.rho_divisions = units;
    ops.cumulative_steps = units;
    ops.rng_draws = g.num_cms;
    return ops;
}

ScalingReport run_scaling_bench(const BenchConfig& config) {
    config.geometry.validate();
    config.params.validate();
    if (config.checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
    for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
        if (config.checkpoints[i] == 0 ||
            (i > 0 && config.checkpoints[i] <= config.checkpoints[i - 1])) {
            throw ConfigError("checkpoints must be positive and strictly ascending");
        }
    }
    if (config.trials_per_checkpoint == 0) throw ConfigError("trials_per_checkpoint must be >= 1");

    const double needed =
        static_cast<double>(config.checkpoints.back()) + config.trials_per_checkpoint;
    const auto& g = config.geometry;
    if (log_binomial(static_cast<double>(g.num_pixels()), g.num_active) <
        std::log(needed) + std::log(2.0)) {
        throw ConfigError("geometry too small to generate " +
                          std::to_string(static_cast<std::uint64_t>(needed)) +
                          " distinct patterns");
    }

    PatternSource source(g, config.seed ^ 0x5851f42d4c957f2dULL);
    MemoryModel model(g, config.params, config.seed);

    std::vector<MemoryModel> snapshots;
    for (auto target : config.checkpoints) {
        while (model.stored_count() < target) model.store(source.next());
        snapshots.push_back(model);
    }
    std::vector<InputPattern> probes;
    for (std::uint32_t t = 0; t < config.trials_per_checkpoint; ++t) probes.push_back(source.next());

    ScalingReport report;
    report.config = config;
    report.checkpoints.resize(snapshots.size());
    for (std::size_t c = 0; c < snapshots.size(); ++c) {
        auto& cp = report.checkpoints[c];
        cp.stored = snapshots[c].stored_count();
        cp.weight_density = static_cast<double>(snapshots[c].weights().count_set()) /
                            static_cast<double>(g.num_pixels() * g.num_units());
        auto scratch = snapshots[c];
        scratch.store(probes.front(), {}, &cp.store_ops);
        Rng rng(config.seed);
        (void)snapshots[c].retrieve(probes.front(), SelectionMode::hard, rng, &cp.retrieve_ops);
    }

    // Interleave checkpoints within each round so clock drift hits all alike.
    std::vector<std::vector<double>> store_ns(snapshots.size()), retrieve_ns(snapshots.size());
    constexpr std::uint32_t kWarmup = 5;
    for (std::uint32_t t = 0; t < config.trials_per_checkpoint + kWarmup; ++t) {
        const auto& probe = probes[t % probes.size()];
        for (std::size_t c = 0; c < snapshots.size(); ++c) {
            auto scratch = snapshots[c];
            const auto t0 = Clock::now();
            auto stored = scratch.store(probe);
            const auto t1 = Clock::now();
            Rng rng(config.seed + t);
            const auto t2 = Clock::now();
            auto retrieved = snapshots[c].retrieve(probe, SelectionMode::hard, rng);
            const auto t3 = Clock::now();
            if (stored.code.size() != retrieved.code.size()) throw Error("bench invariant broken");
            if (t < kWarmup) continue;
            store_ns[c].push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
            retrieve_ns[c].push_back(std::chrono::duration<double, std::nano>(t3 - t2).count());
        }
    }
    for (std::size_t c = 0; c < snapshots.size(); ++c) {
        report.checkpoints[c].store = summarize(std::move(store_ns[c]));
        report.checkpoints[c].retrieve = summarize(std::move(retrieve_ns[c]));
    }
    return report;
}

nlohmann::json to_json(const ScalingReport& report) {
    nlohmann::json doc;
    doc["schema"] = "msdc-scaling-report/1";
    doc["config"] = {{"geometry", report.config.geometry},
                     {"params", report.config.params},
                     {"checkpoints", report.config.checkpoints},
                     {"trials_per_checkpoint", report.config.trials_per_checkpoint},
                     {"seed", report.config.seed}};
    doc["expected_store_ops"] = ops_json(expected_store_ops(report.config.geometry));
    auto& cps = doc["checkpoints"] = nlohmann::json::array();
    for (const auto& c : report.checkpoints) {
        cps.push_back({{"stored", c.stored},
                       {"weight_density", c.weight_density},
                       {"store_latency_ns", {{"median", c.store.median_ns}, {"p95", c.store.p95_ns}}},
                       {"retrieve_latency_ns",
                        {{"median", c.retrieve.median_ns}, {"p95", c.retrieve.p95_ns}}},
                       {"store_ops", ops_json(c.store_ops)},
                       {"retrieve_ops", ops_json(c.retrieve_ops)}});
    }
    doc["op_counts_equal"] = report.op_counts_equal();
    return doc;
}

std::vector<std::string> validate_report_json(const nlohmann::json& doc) {
    std::vector<std::string> problems;
    auto need = [&](const nlohmann::json& obj, const char* key, auto pred, const std::string& at) {
        if (!obj.is_object() || !obj.contains(key) || !pred(obj.at(key))) {
            problems.push_back(at + "." + key + " missing or wrong type");
            return false;
        }
        return true;
    };
    auto is_num = [](const nlohmann::json& v) { return v.is_number(); };
    auto is_uint = [](const nlohmann::json& v) { return v.is_number_unsigned(); };
    auto is_obj = [](const nlohmann::json& v) { return v.is_object(); };
    auto is_arr = [](const nlohmann::json& v) { return v.is_array(); };

    if (need(doc, "schema", [](const nlohmann::json& v) { return v.is_string(); }, "$") &&
        doc["schema"] != "msdc-scaling-report/1") {
        problems.push_back("$.schema has unexpected value");
    }
    need(doc, "op_counts_equal", [](const nlohmann::json& v) { return v.is_boolean(); }, "$");
    need(doc, "expected_store_ops", is_obj, "$");
    if (need(doc, "config", is_obj, "$")) {
        need(doc["config"], "checkpoints", is_arr, "$.config");
        need(doc["config"], "geometry", is_obj, "$.config");
        need(doc["config"], "params", is_obj, "$.config");
    }
    if (need(doc, "checkpoints", is_arr, "$")) {
        const auto& cps = doc["checkpoints"];
        if (doc.contains("config") && doc["config"].contains("checkpoints") &&
            cps.size() != doc["config"]["checkpoints"].size()) {
            problems.push_back("$.checkpoints does not cover every configured checkpoint");
        }
        for (std::size_t i = 0; i < cps.size(); ++i) {
            const auto at = "$.checkpoints[" + std::to_string(i) + "]";
            need(cps[i], "stored", is_uint, at);
            need(cps[i], "weight_density", is_num, at);
            for (const char* lat : {"store_latency_ns", "retrieve_latency_ns"}) {
                if (need(cps[i], lat, is_obj, at)) {
                    need(cps[i][lat], "median", is_num, at + "." + lat);
                    need(cps[i][lat], "p95", is_num, at + "." + lat);
                }
            }
            for (const char* ops : {"store_ops", "retrieve_ops"}) {
                if (need(cps[i], ops, is_obj, at)) need(cps[i][ops], "total", is_uint, at + "." + ops);
            }
        }
    }
    return problems;
}

}  // namespace msdc::bench
