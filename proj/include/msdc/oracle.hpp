#pragma once

// Brute-force references computed from raw patterns and codes only. Nothing
// here accepts a weight matrix or a model.

#include <cstdint>
#include <string>
#include <vector>

#include "msdc/pattern.hpp"

namespace msdc::oracle {

struct LabeledPattern {
    std::string label;
    InputPattern pattern;
};

/// |a ∩ b| / S. Throws PatternError when the two patterns differ in size.
double similarity(const InputPattern& a, const InputPattern& b);

/// All labels tied for the highest similarity, in corpus order.
std::vector<std::string> nearest(const InputPattern& query,
                                 const std::vector<LabeledPattern>& corpus);

/// Monte-Carlo mean |c1 ∩ c2| over pairs of independent uniform codes.
double expected_uniform_intersection(std::uint32_t num_cms, std::uint32_t units_per_cm,
                                     std::uint64_t trials, std::uint64_t seed);

struct OracleReport {
    std::vector<std::string> nearest_labels;
    std::vector<double> input_similarities;
    std::vector<std::size_t> code_intersections;
};

/// Direct readout for one query against stored (pattern, code) pairs.
OracleReport report(const InputPattern& query, const Code& query_code,
                    const std::vector<LabeledPattern>& corpus, const std::vector<Code>& codes);

}  // namespace msdc::oracle
