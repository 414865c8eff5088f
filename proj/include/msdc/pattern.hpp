#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "msdc/geometry.hpp"

namespace msdc {

/// A binary pixel pattern stored as its sorted, duplicate-free active indices.
class InputPattern {
public:
    InputPattern() = default;

    /// Sorts the indices; throws PatternError on duplicates.
    explicit InputPattern(std::vector<std::uint32_t> active_pixels);

    [[nodiscard]] std::span<const std::uint32_t> active() const noexcept { return active_; }
    [[nodiscard]] std::size_t size() const noexcept { return active_.size(); }
    [[nodiscard]] bool contains(std::uint32_t pixel) const noexcept;

    /// Number of shared active pixels.
    [[nodiscard]] std::size_t overlap(const InputPattern& other) const noexcept;

    /// Throws PatternError unless every pixel is in range and exactly S are active.
    void check_against(const ModelGeometry& geometry) const;

    friend bool operator==(const InputPattern&, const InputPattern&) = default;

private:
    std::vector<std::uint32_t> active_;
};

/// One winner per competitive module.
class Code {
public:
    Code() = default;
    explicit Code(std::vector<std::uint32_t> winners) : winners_(std::move(winners)) {}

    [[nodiscard]] std::span<const std::uint32_t> winners() const noexcept { return winners_; }
    [[nodiscard]] std::size_t size() const noexcept { return winners_.size(); }
    [[nodiscard]] std::uint32_t operator[](std::size_t cm) const { return winners_[cm]; }

    /// Number of modules in which both codes chose the same unit.
    /// Throws StructuralError on length mismatch.
    [[nodiscard]] std::size_t intersection(const Code& other) const;

    void check_against(const ModelGeometry& geometry) const;

    friend bool operator==(const Code&, const Code&) = default;

private:
    std::vector<std::uint32_t> winners_;
};

}  // namespace msdc
