#include "msdc/pattern.hpp"

#include <algorithm>
#include <string>

#include "msdc/error.hpp"

namespace msdc {

InputPattern::InputPattern(std::vector<std::uint32_t> active_pixels)
    : active_(std::move(active_pixels)) {
    std::sort(active_.begin(), active_.end());
    if (std::adjacent_find(active_.begin(), active_.end()) != active_.end()) {
        throw PatternError("duplicate pixel index in input pattern");
    }
}

bool InputPattern::contains(std::uint32_t pixel) const noexcept {
    return std::binary_search(active_.begin(), active_.end(), pixel);
}

std::size_t InputPattern::overlap(const InputPattern& other) const noexcept {
    std::size_t n = 0;
    auto a = active_.begin();
    auto b = other.active_.begin();
    while (a != active_.end() && b != other.active_.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++n;
            ++a;
            ++b;
        }
    }
    return n;
}

void InputPattern::check_against(const ModelGeometry& geometry) const {
    if (active_.size() != geometry.num_active) {
        throw PatternError("pattern has " + std::to_string(active_.size()) +
                           " active pixels, expected exactly " +
                           std::to_string(geometry.num_active));
    }
    if (!active_.empty() && active_.back() >= geometry.num_pixels()) {
        throw PatternError("pixel index " + std::to_string(active_.back()) +
                           " out of range for " + std::to_string(geometry.num_pixels()) +
                           " pixels");
    }
}

std::size_t Code::intersection(const Code& other) const {
    if (winners_.size() != other.winners_.size()) {
        throw StructuralError("cannot intersect codes of different length");
    }
    std::size_t n = 0;
    for (std::size_t q = 0; q < winners_.size(); ++q) {
        n += winners_[q] == other.winners_[q] ? 1 : 0;
    }
    return n;
}

void Code::check_against(const ModelGeometry& geometry) const {
    if (winners_.size() != geometry.num_cms) {
        throw StructuralError("code length " + std::to_string(winners_.size()) +
                              " does not match Q = " + std::to_string(geometry.num_cms));
    }
    for (auto w : winners_) {
        if (w >= geometry.units_per_cm) {
            throw StructuralError("winner index " + std::to_string(w) + " out of range for K = " +
                                  std::to_string(geometry.units_per_cm));
        }
    }
}

}  // namespace msdc
