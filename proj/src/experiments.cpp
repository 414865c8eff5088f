#include "msdc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "msdc/error.hpp"

namespace msdc::experiments {
namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

const char* to_string(StoreOrder order) {
    return order == StoreOrder::fixed ? "fixed" : "shuffled";
}

}  // namespace

ScenarioSpec ScenarioSpec::appendix() {
    ScenarioSpec s;
    s.probes = {
        {"I7", {5, 3, 2, 1, 1, 0}},
        {"I8", {0, 7, 3, 1, 1, 0}},
        {"I9", {0, 0, 6, 0, 0, 6}},
    };
    s.seeds.resize(500);
    std::iota(s.seeds.begin(), s.seeds.end(), std::uint64_t{1});
    return s;
}

void ScenarioSpec::validate() const {
    geometry.validate();
    params.validate();
    if (weight_quantum == 0) throw ConfigError("weight_quantum must be positive");
    if (num_stored == 0) throw ConfigError("num_stored must be at least 1");
    if (static_cast<std::size_t>(num_stored) * geometry.num_active > geometry.num_pixels()) {
        throw ConfigError("not enough pixels for " + std::to_string(num_stored) +
                          " disjoint stored patterns");
    }
    if (seeds.empty()) throw ConfigError("scenario needs at least one seed");
    if (probes.empty()) throw ConfigError("scenario needs at least one probe");
    for (const auto& p : probes) {
        if (p.overlaps.size() != num_stored) {
            throw ConfigError("probe " + p.label + " overlap schedule has " +
                              std::to_string(p.overlaps.size()) + " entries, expected " +
                              std::to_string(num_stored));
        }
    }
}

void to_json(nlohmann::json& j, const ScenarioSpec& s) {
    nlohmann::json probes = nlohmann::json::array();
    for (const auto& p : s.probes) probes.push_back({{"label", p.label}, {"overlaps", p.overlaps}});
    j = {{"name", s.name},
         {"geometry", s.geometry},
         {"params", s.params},
         {"weight_quantum", s.weight_quantum},
         {"num_stored", s.num_stored},
         {"layout_seed", s.layout_seed},
         {"probes", probes},
         {"seeds", s.seeds},
         {"mode", msdc::to_string(s.mode)},
         {"store_order", to_string(s.store_order)}};
}

void from_json(const nlohmann::json& j, ScenarioSpec& s) {
    if (!j.is_object()) throw ConfigError("scenario spec must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "name") {
                s.name = value.get<std::string>();
            } else if (key == "geometry") {
                msdc::from_json(value, s.geometry);
            } else if (key == "params") {
                msdc::from_json(value, s.params);
            } else if (key == "weight_quantum") {
                s.weight_quantum = value.get<std::uint32_t>();
            } else if (key == "num_stored") {
                s.num_stored = value.get<std::uint32_t>();
            } else if (key == "layout_seed") {
                s.layout_seed = value.get<std::uint64_t>();
            } else if (key == "probes") {
                s.probes.clear();
                for (const auto& p : value) {
                    s.probes.push_back({p.at("label").get<std::string>(),
                                        p.at("overlaps").get<std::vector<std::uint32_t>>()});
                }
            } else if (key == "seeds") {
                if (value.is_array()) {
                    s.seeds = value.get<std::vector<std::uint64_t>>();
                } else {
                    const auto first = value.at("first").get<std::uint64_t>();
                    const auto count = value.at("count").get<std::uint64_t>();
                    s.seeds.resize(count);
                    std::iota(s.seeds.begin(), s.seeds.end(), first);
                }
            } else if (key == "mode") {
                s.mode = parse_selection_mode(value.get<std::string>());
            } else if (key == "store_order") {
                const auto v = value.get<std::string>();
                if (v == "fixed") {
                    s.store_order = StoreOrder::fixed;
                } else if (v == "shuffled") {
                    s.store_order = StoreOrder::shuffled;
                } else {
                    throw ConfigError("store_order must be fixed|shuffled");
                }
            } else if (key == "notes") {
                // free-form documentation, ignored
            } else {
                throw ConfigError("unknown key '" + key + "' in scenario spec");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid scenario spec: ") + e.what());
    }
}

ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
    auto s = ScenarioSpec::appendix();
    from_json(read_json_file(path), s);
    s.validate();
    return s;
}

Corpus build_appendix_corpus(const ScenarioSpec& spec) {
    spec.validate();
    const auto S = spec.geometry.num_active;
    std::vector<std::uint32_t> pixels(spec.geometry.num_pixels());
    std::iota(pixels.begin(), pixels.end(), 0u);
    Rng layout(spec.layout_seed);
    std::shuffle(pixels.begin(), pixels.end(), layout);

    Corpus corpus;
    for (std::uint32_t i = 0; i < spec.num_stored; ++i) {
        const auto first = pixels.begin() + static_cast<std::ptrdiff_t>(i) * S;
        corpus.stored.push_back(
            {"I" + std::to_string(i + 1), InputPattern({first, first + S})});
    }
    const auto background_begin = static_cast<std::size_t>(spec.num_stored) * S;
    const auto background_size = pixels.size() - background_begin;

    for (const auto& probe : spec.probes) {
        const auto demanded =
            std::accumulate(probe.overlaps.begin(), probe.overlaps.end(), std::uint64_t{0});
        if (demanded > S) {
            throw ConfigError("probe " + probe.label + " demands " + std::to_string(demanded) +
                              " overlapping pixels but S = " + std::to_string(S));
        }
        if (S - demanded > background_size) {
            throw ConfigError("probe " + probe.label + " needs " +
                              std::to_string(S - demanded) + " background pixels, only " +
                              std::to_string(background_size) + " free");
        }
        std::vector<std::uint32_t> active;
        for (std::uint32_t i = 0; i < spec.num_stored; ++i) {
            // Each stored item contributes its first `overlap` pixels in layout order.
            const auto base = static_cast<std::size_t>(i) * S;
            for (std::uint32_t k = 0; k < probe.overlaps[i]; ++k) active.push_back(pixels[base + k]);
        }
        for (std::size_t k = 0; active.size() < S; ++k) active.push_back(pixels[background_begin + k]);
        corpus.probes.push_back({probe.label, InputPattern(std::move(active))});
    }
    return corpus;
}

ScenarioResults run_scenario(const ScenarioSpec& spec) {
    ScenarioResults results;
    results.spec = spec;
    results.corpus = build_appendix_corpus(spec);

    std::vector<std::size_t> order(results.corpus.stored.size());
    for (auto seed : spec.seeds) {
        MemoryModel model(spec.geometry, spec.params, seed, /*ledger_enabled=*/true,
                          spec.weight_quantum);
        std::iota(order.begin(), order.end(), 0);
        if (spec.store_order == StoreOrder::shuffled) {
            Rng order_rng(seed ^ 0x9e3779b97f4a7c15ULL);
            std::shuffle(order.begin(), order.end(), order_rng);
        }
        for (auto i : order) {
            const auto& item = results.corpus.stored[i];
            model.store(item.pattern, item.label);
        }
        for (const auto& probe : results.corpus.probes) {
            auto report = model.belief_update(probe.pattern, spec.mode);
            TrialRecord rec;
            rec.seed = seed;
            rec.probe = probe.label;
            rec.familiarity = report.selection.trace.familiarity;
            rec.eta = report.selection.trace.eta;
            rec.max_mu = *std::max_element(report.selection.trace.mu.begin(),
                                           report.selection.trace.mu.end());
            rec.code = report.selection.code;
            // Report in stored-item order regardless of storage order.
            rec.items.resize(report.items.size());
            for (std::size_t k = 0; k < report.items.size(); ++k) {
                rec.items[order[k]] = std::move(report.items[k]);
            }
            results.trials.push_back(std::move(rec));
        }
    }
    return results;
}

std::vector<ItemAggregate> aggregate_items(const ScenarioResults& results) {
    std::vector<ItemAggregate> out;
    const auto& stored = results.corpus.stored;
    for (const auto& probe : results.corpus.probes) {
        for (std::size_t i = 0; i < stored.size(); ++i) {
            std::vector<double> likelihoods, intersections;
            std::size_t top = 0;
            for (const auto& t : results.trials) {
                if (t.probe != probe.label) continue;
                likelihoods.push_back(t.items[i].likelihood);
                intersections.push_back(static_cast<double>(t.items[i].code_intersection));
                bool unique_max = true;
                for (std::size_t k = 0; k < t.items.size(); ++k) {
                    if (k != i && t.items[k].likelihood >= t.items[i].likelihood) {
                        unique_max = false;
                    }
                }
                top += unique_max ? 1 : 0;
            }
            ItemAggregate a;
            a.probe = probe.label;
            a.item = stored[i].label;
            a.input_similarity = oracle::similarity(probe.pattern, stored[i].pattern);
            a.n_seeds = likelihoods.size();
            const auto ls = mean_std(likelihoods);
            a.mean_likelihood = ls.mean;
            a.stddev_likelihood = ls.stddev;
            a.mean_intersection = mean_std(intersections).mean;
            a.top_fraction =
                a.n_seeds ? static_cast<double>(top) / static_cast<double>(a.n_seeds) : 0.0;
            out.push_back(std::move(a));
        }
    }
    return out;
}

std::vector<ProbeSummary> summarize_probes(const ScenarioResults& results) {
    const auto items = aggregate_items(results);
    std::vector<ProbeSummary> out;
    for (const auto& probe : results.corpus.probes) {
        ProbeSummary s;
        s.probe = probe.label;
        std::vector<double> gs;
        for (const auto& t : results.trials) {
            if (t.probe == probe.label) gs.push_back(t.familiarity);
        }
        s.n_seeds = gs.size();
        const auto g = mean_std(gs);
        s.mean_familiarity = g.mean;
        s.stddev_familiarity = g.stddev;
        std::vector<double> sims, means;
        for (const auto& a : items) {
            if (a.probe != probe.label) continue;
            sims.push_back(a.input_similarity);
            means.push_back(a.mean_intersection);
        }
        s.spearman = spearman(sims, means);
        out.push_back(std::move(s));
    }
    return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StructuralError("spearman: length mismatch");
    if (x.size() < 2) return 0.0;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

ResultFormat parse_result_format(std::string_view text) {
    if (text == "csv") return ResultFormat::csv;
    if (text == "json") return ResultFormat::json;
    throw ConfigError("unknown result format '" + std::string(text) + "' (expected csv|json)");
}

std::vector<std::filesystem::path> emit_results(const ScenarioResults& results,
                                                ResultFormat format,
                                                const std::filesystem::path& out_dir) {
    if (results.trials.empty()) throw Error("no trial results to emit");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const nlohmann::json spec_json = results.spec;
    const auto items = aggregate_items(results);
    const auto summaries = summarize_probes(results);
    std::vector<std::filesystem::path> written;

    auto open = [&](const std::string& name) {
        auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        written.push_back(path);
        return out;
    };
    auto close = [&](std::ofstream& out) {
        out.flush();
        if (!out) throw IoError("write failed for " + written.back().string());
    };

    if (format == ResultFormat::csv) {
        const std::string provenance = "# config: " + spec_json.dump() + "\n";
        {
            auto out = open("trials.csv");
            out << provenance
                << "seed,probe,item,input_similarity,code_intersection,likelihood,G\n";
            for (const auto& t : results.trials) {
                for (const auto& it : t.items) {
                    out << t.seed << ',' << t.probe << ',' << it.label << ','
                        << fmt6(it.input_similarity) << ',' << it.code_intersection << ','
                        << fmt6(it.likelihood) << ',' << fmt6(t.familiarity) << '\n';
                }
            }
            close(out);
        }
        {
            auto out = open("aggregate.csv");
            out << provenance
                << "probe,item,input_similarity,n_seeds,mean_likelihood,stddev_likelihood,"
                   "mean_intersection,top_fraction\n";
            for (const auto& a : items) {
                out << a.probe << ',' << a.item << ',' << fmt6(a.input_similarity) << ','
                    << a.n_seeds << ',' << fmt6(a.mean_likelihood) << ','
                    << fmt6(a.stddev_likelihood) << ',' << fmt6(a.mean_intersection) << ','
                    << fmt6(a.top_fraction) << '\n';
            }
            close(out);
        }
        {
            auto out = open("summary.csv");
            out << provenance << "probe,n_seeds,mean_G,stddev_G,spearman\n";
            for (const auto& s : summaries) {
                out << s.probe << ',' << s.n_seeds << ',' << fmt6(s.mean_familiarity) << ','
                    << fmt6(s.stddev_familiarity) << ',' << fmt6(s.spearman) << '\n';
            }
            close(out);
        }
        return written;
    }

    nlohmann::json doc;
    doc["config"] = spec_json;
    auto& trials = doc["trials"] = nlohmann::json::array();
    for (const auto& t : results.trials) {
        nlohmann::json row = {{"seed", t.seed},
                              {"probe", t.probe},
                              {"G", t.familiarity},
                              {"eta", t.eta},
                              {"max_mu", t.max_mu},
                              {"code", std::vector<std::uint32_t>(t.code.winners().begin(),
                                                                  t.code.winners().end())}};
        auto& its = row["items"] = nlohmann::json::array();
        for (const auto& it : t.items) {
            its.push_back({{"item", it.label},
                           {"input_similarity", it.input_similarity},
                           {"code_intersection", it.code_intersection},
                           {"likelihood", it.likelihood}});
        }
        trials.push_back(std::move(row));
    }
    auto& agg = doc["aggregate"] = nlohmann::json::array();
    for (const auto& a : items) {
        agg.push_back({{"probe", a.probe},
                       {"item", a.item},
                       {"input_similarity", a.input_similarity},
                       {"n_seeds", a.n_seeds},
                       {"mean_likelihood", a.mean_likelihood},
                       {"stddev_likelihood", a.stddev_likelihood},
                       {"mean_intersection", a.mean_intersection},
                       {"top_fraction", a.top_fraction}});
    }
    auto& sum = doc["summary"] = nlohmann::json::array();
    for (const auto& s : summaries) {
        sum.push_back({{"probe", s.probe},
                       {"n_seeds", s.n_seeds},
                       {"mean_G", s.mean_familiarity},
                       {"stddev_G", s.stddev_familiarity},
                       {"spearman", s.spearman}});
    }
    auto out = open("results.json");
    out << doc.dump(2) << '\n';
    close(out);
    return written;
}

}  // namespace msdc::experiments
