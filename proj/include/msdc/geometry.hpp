#pragma once

#include <cstddef>
#include <cstdint>

namespace msdc {

/// Dimensions of an input grid connected all-to-all to a coding field of
/// `num_cms` winner-take-all modules with `units_per_cm` units each.
struct ModelGeometry {
    std::uint32_t input_width = 12;
    std::uint32_t input_height = 12;
    std::uint32_t num_active = 12;  // S
    std::uint32_t num_cms = 24;     // Q
    std::uint32_t units_per_cm = 8; // K

    [[nodiscard]] std::size_t num_pixels() const noexcept {
        return static_cast<std::size_t>(input_width) * input_height;
    }
    [[nodiscard]] std::size_t num_units() const noexcept {
        return static_cast<std::size_t>(num_cms) * units_per_cm;
    }
    [[nodiscard]] std::size_t unit_index(std::uint32_t cm, std::uint32_t k) const noexcept {
        return static_cast<std::size_t>(cm) * units_per_cm + k;
    }

    /// Throws ConfigError when an invariant does not hold.
    void validate() const;

    friend bool operator==(const ModelGeometry&, const ModelGeometry&) = default;
};

}  // namespace msdc
