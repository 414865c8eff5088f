#include "msdc/oracle.hpp"

#include <algorithm>
#include <random>

#include "msdc/error.hpp"
#include "msdc/rng.hpp"

namespace msdc::oracle {

double similarity(const InputPattern& a, const InputPattern& b) {
    if (a.size() != b.size()) {
        throw PatternError("similarity requires patterns with the same active count");
    }
    if (a.size() == 0) {
        throw PatternError("similarity of empty patterns is undefined");
    }
    // Counted by membership, independent of InputPattern::overlap.
    std::size_t shared = 0;
    for (auto pixel : a.active()) {
        shared += std::count(b.active().begin(), b.active().end(), pixel);
    }
    return static_cast<double>(shared) / static_cast<double>(a.size());
}

std::vector<std::string> nearest(const InputPattern& query,
                                 const std::vector<LabeledPattern>& corpus) {
    if (corpus.empty()) {
        throw Error("nearest-neighbour query against an empty corpus");
    }
    std::vector<double> sims;
    sims.reserve(corpus.size());
    for (const auto& item : corpus) sims.push_back(similarity(query, item.pattern));
    const double best = *std::max_element(sims.begin(), sims.end());
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (sims[i] == best) labels.push_back(corpus[i].label);
    }
    return labels;
}

double expected_uniform_intersection(std::uint32_t num_cms, std::uint32_t units_per_cm,
                                     std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) throw Error("trials must be at least 1");
    if (num_cms == 0 || units_per_cm == 0) throw ConfigError("Q and K must be positive");
    Rng rng(seed);
    std::uniform_int_distribution<std::uint32_t> unit(0, units_per_cm - 1);
    std::uint64_t total = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (std::uint32_t q = 0; q < num_cms; ++q) {
            total += unit(rng) == unit(rng) ? 1 : 0;
        }
    }
    return static_cast<double>(total) / static_cast<double>(trials);
}

OracleReport report(const InputPattern& query, const Code& query_code,
                    const std::vector<LabeledPattern>& corpus, const std::vector<Code>& codes) {
    if (corpus.size() != codes.size()) {
        throw StructuralError("corpus and code lists differ in length");
    }
    OracleReport out;
    out.nearest_labels = nearest(query, corpus);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        out.input_similarities.push_back(similarity(query, corpus[i].pattern));
        const auto w = codes[i].winners();
        const auto qw = query_code.winners();
        if (w.size() != qw.size()) throw StructuralError("code length mismatch");
        std::size_t n = 0;
        for (std::size_t q = 0; q < w.size(); ++q) n += w[q] == qw[q] ? 1 : 0;
        out.code_intersections.push_back(n);
    }
    return out;
}

}  // namespace msdc::oracle
