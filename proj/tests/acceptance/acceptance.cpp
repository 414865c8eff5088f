// Acceptance suite: one PASS/FAIL line per criterion with the measured values.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msdc/bench.hpp"
#include "msdc/config.hpp"
#include "msdc/experiments.hpp"
#include "msdc/memory.hpp"
#include "msdc/oracle.hpp"
#include "msdc/snapshot.hpp"

namespace fs = std::filesystem;
using namespace msdc;
using namespace msdc::experiments;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

const fs::path kSpecPath = fs::path(MSDC_SOURCE_DIR) / "configs" / "appendix.json";

InputPattern range_pattern(std::uint32_t first, std::uint32_t count) {
    std::vector<std::uint32_t> v(count);
    for (std::uint32_t i = 0; i < count; ++i) v[i] = first + i;
    return InputPattern(std::move(v));
}

std::size_t probe_index(const ScenarioSpec& spec, const std::string& label) {
    for (std::size_t i = 0; i < spec.probes.size(); ++i)
        if (spec.probes[i].label == label) return i;
    throw Error("probe " + label + " missing from bundled scenario");
}

const ItemAggregate& find_aggregate(const std::vector<ItemAggregate>& aggs, const std::string& probe,
                                    const std::string& item) {
    for (const auto& a : aggs)
        if (a.probe == probe && a.item == item) return a;
    throw Error("no aggregate for " + probe + "/" + item);
}

// Bundled scenario results, computed once and shared by criteria 4-6.
const ScenarioResults& bundled_results() {
    static const ScenarioResults results = run_scenario(load_scenario_spec(kSpecPath));
    return results;
}

Outcome zero_knowledge() {
    const ModelGeometry g;
    MemoryModel m(g, CsaParams{}, 1);
    const auto first = m.store(range_pattern(0, 12));
    const MemoryModel empty(g, CsaParams{}, 1);
    const std::uint64_t draws = 50000;
    const double p = 1.0 / g.units_per_cm;
    const double sigma = std::sqrt(draws * p * (1 - p));
    std::vector<std::uint64_t> counts(g.num_units(), 0);
    Rng rng(2024);
    const auto probe = range_pattern(30, 12);
    for (std::uint64_t d = 0; d < draws; ++d) {
        const auto s = empty.retrieve(probe, SelectionMode::soft, rng);
        for (std::uint32_t q = 0; q < g.num_cms; ++q) ++counts[g.unit_index(q, s.code[q])];
    }
    double worst = 0.0;
    for (auto c : counts) worst = std::max(worst, std::fabs(c - draws * p) / sigma);
    const bool pass = first.trace.familiarity == 0.0 && worst <= 4.0;
    return {pass, fmt("G=%.1f, worst per-unit deviation %.2f sigma over %zu units x %llu draws",
                      first.trace.familiarity, worst, counts.size(),
                      static_cast<unsigned long long>(draws))};
}

Outcome perfect_recall() {
    const ModelGeometry g;
    std::mt19937_64 layout(7);
    std::size_t exact = 0;
    std::size_t full_g = 0;
    const std::size_t cases = 100;
    for (std::size_t seed = 0; seed < cases; ++seed) {
        std::vector<std::uint32_t> pixels(g.num_pixels());
        for (std::uint32_t i = 0; i < pixels.size(); ++i) pixels[i] = i;
        std::shuffle(pixels.begin(), pixels.end(), layout);
        pixels.resize(g.num_active);
        const InputPattern x(pixels);
        MemoryModel m(g, CsaParams{}, seed);
        const auto stored = m.store(x);
        const auto back = m.retrieve(x, SelectionMode::hard);
        exact += back.code == stored.code;
        full_g += back.trace.familiarity == 1.0;
    }
    return {exact == cases && full_g == cases,
            fmt("exact code %zu/%zu, G=1.0 %zu/%zu", exact, cases, full_g, cases)};
}

Outcome chance_intersection() {
    const double mean = oracle::expected_uniform_intersection(24, 8, 100000, 3);
    return {std::fabs(mean - 3.0) <= 0.05, fmt("mean |c1 ∩ c2| = %.4f (Q/K = 3)", mean)};
}

Outcome scenario_a() {
    const auto& res = bundled_results();
    const auto aggs = aggregate_items(res);
    const auto sums = summarize_probes(res);
    const auto& sum = sums[probe_index(res.spec, "I7")];
    const auto& i1 = find_aggregate(aggs, "I7", "I1");
    const auto& i6 = find_aggregate(aggs, "I7", "I6");

    // Spot check: the seed whose I1/I2 intersections come closest to 18/24 and 12/24.
    std::uint64_t best_seed = 0;
    std::size_t best_i1 = 0, best_i2 = 0;
    long best_dist = std::numeric_limits<long>::max();
    for (const auto& t : res.trials) {
        if (t.probe != "I7") continue;
        const long a = static_cast<long>(t.items[0].code_intersection);
        const long b = static_cast<long>(t.items[1].code_intersection);
        const long dist = std::labs(a - 18) + std::labs(b - 12);
        if (dist < best_dist) {
            best_dist = dist;
            best_seed = t.seed;
            best_i1 = t.items[0].code_intersection;
            best_i2 = t.items[1].code_intersection;
        }
    }
    const bool pass = sum.n_seeds >= 200 && sum.spearman >= 0.9 && i1.top_fraction >= 0.9 &&
                      std::fabs(i6.mean_likelihood - 0.125) <= 0.02;
    return {pass,
            fmt("seeds=%zu spearman=%.4f I1 top in %.1f%% (mean L=%.3f) I6 mean L=%.4f; "
                "closest single trial to 18/24,12/24: seed %llu with %zu/24,%zu/24",
                sum.n_seeds, sum.spearman, 100 * i1.top_fraction, i1.mean_likelihood,
                i6.mean_likelihood, static_cast<unsigned long long>(best_seed), best_i1, best_i2)};
}

Outcome scenario_b() {
    const auto& res = bundled_results();
    const auto aggs = aggregate_items(res);
    const auto& i2 = find_aggregate(aggs, "I8", "I2");

    std::ifstream in(kSpecPath);
    const auto doc = nlohmann::json::parse(in);
    const auto anchor = doc.at("notes").at("anchor_seeds").at("I8").get<std::uint64_t>();
    const TrialRecord* trial = nullptr;
    for (const auto& t : res.trials)
        if (t.probe == "I8" && t.seed == anchor) trial = &t;
    if (!trial) return {false, fmt("anchor seed %llu not in the seed list",
                                   static_cast<unsigned long long>(anchor))};
    const bool anchor_ok =
        std::fabs(trial->familiarity - 0.65) <= 0.1 && trial->items[1].code_intersection == 21;
    return {i2.top_fraction >= 0.9 && anchor_ok,
            fmt("I2 top in %.1f%% (mean L=%.3f); anchor seed %llu: G=%.4f, I2 %zu/24",
                100 * i2.top_fraction, i2.mean_likelihood, static_cast<unsigned long long>(anchor),
                trial->familiarity, trial->items[1].code_intersection)};
}

Outcome scenario_c() {
    const auto& res = bundled_results();
    const auto aggs = aggregate_items(res);
    const auto& i3 = find_aggregate(aggs, "I9", "I3");
    const auto& i6 = find_aggregate(aggs, "I9", "I6");
    std::size_t n = 0, top_two = 0;
    for (const auto& t : res.trials) {
        if (t.probe != "I9") continue;
        ++n;
        const double floor = std::min(t.items[2].likelihood, t.items[5].likelihood);
        bool ok = true;
        for (std::size_t k = 0; k < t.items.size(); ++k)
            if (k != 2 && k != 5 && t.items[k].likelihood >= floor) ok = false;
        top_two += ok;
    }
    const double frac = n ? static_cast<double>(top_two) / n : 0.0;
    const double gap = std::fabs(i3.mean_likelihood - i6.mean_likelihood);
    return {n >= 200 && frac >= 0.9 && gap <= 0.1,
            fmt("seeds=%zu I3,I6 strict top two in %.1f%%; mean L(I3)=%.4f L(I6)=%.4f |diff|=%.4f",
                n, 100 * frac, i3.mean_likelihood, i6.mean_likelihood, gap)};
}

Outcome fixed_time() {
    bench::BenchConfig c;
    c.trials_per_checkpoint = 1001;
    c.seed = 5;
    const auto report = bench::run_scaling_bench(c);
    const bench::Checkpoint* at10 = nullptr;
    const bench::Checkpoint* at5000 = nullptr;
    for (const auto& cp : report.checkpoints) {
        if (cp.stored == 10) at10 = &cp;
        if (cp.stored == 5000) at5000 = &cp;
    }
    const double ratio = at5000->store.median_ns / at10->store.median_ns;
    return {report.op_counts_equal() && ratio <= 1.25,
            fmt("ops per store %llu at every checkpoint (equal=%s); median store %.0f ns @10, "
                "%.0f ns @5000, ratio %.3f",
                static_cast<unsigned long long>(report.checkpoints.front().store_ops.total()),
                report.op_counts_equal() ? "yes" : "no", at10->store.median_ns,
                at5000->store.median_ns, ratio)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto base = fs::temp_directory_path() /
                      ("msdc_acceptance_" + std::to_string(std::random_device{}()));
    const auto spec = load_scenario_spec(kSpecPath);
    const auto f1 = emit_results(run_scenario(spec), ResultFormat::csv, base / "a");
    const auto f2 = emit_results(run_scenario(spec), ResultFormat::csv, base / "b");
    bool csv_same = f1.size() == f2.size() && !f1.empty();
    for (std::size_t i = 0; csv_same && i < f1.size(); ++i) csv_same = slurp(f1[i]) == slurp(f2[i]);

    const auto corpus = build_appendix_corpus(spec);
    MemoryModel m(spec.geometry, spec.params, 77, true);
    for (const auto& item : corpus.stored) m.store(item.pattern, item.label);
    save_model(m, base / "model.msdc");
    auto back = load_model(base / "model.msdc");
    bool traces_same = back == m;
    for (int i = 0; i < 20 && traces_same; ++i) {
        const auto& probe = corpus.probes[i % corpus.probes.size()].pattern;
        const auto mode = i % 2 ? SelectionMode::hard : SelectionMode::soft;
        const auto a = m.retrieve(probe, mode);
        const auto b = back.retrieve(probe, mode);
        traces_same = a.code == b.code && a.trace == b.trace;
    }
    const auto s1 = m.store(corpus.probes[0].pattern, "extra");
    const auto s2 = back.store(corpus.probes[0].pattern, "extra");
    traces_same = traces_same && s1.trace == s2.trace && encode_snapshot(m) == encode_snapshot(back);
    fs::remove_all(base);
    return {csv_same && traces_same,
            fmt("%zu CSV files byte-identical=%s; snapshot round trip traces identical=%s",
                f1.size(), csv_same ? "yes" : "no", traces_same ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"zero-knowledge uniformity", zero_knowledge},
        {"perfect recall", perfect_recall},
        {"chance intersection", chance_intersection},
        {"scenario A (graded probe I7)", scenario_a},
        {"scenario B (peaked probe I8)", scenario_b},
        {"scenario C (split probe I9)", scenario_c},
        {"fixed-time storage", fixed_time},
        {"determinism and persistence", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !o.pass;
        std::printf("%s criterion %zu: %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
