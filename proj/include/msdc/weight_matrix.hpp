#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "msdc/geometry.hpp"

namespace msdc {

inline constexpr std::uint32_t kDefaultWeightQuantum = 127;

/// Binary pixel-to-unit weights, bit-packed one row per pixel.
///
/// A set bit reads back as the weight quantum, a clear bit as zero. Bits are
/// only ever set: the matrix is monotone over its lifetime.
class WeightMatrix {
public:
    WeightMatrix() = default;
    WeightMatrix(std::size_t num_pixels, std::size_t num_units,
                 std::uint32_t quantum = kDefaultWeightQuantum);
    explicit WeightMatrix(const ModelGeometry& geometry,
                          std::uint32_t quantum = kDefaultWeightQuantum)
        : WeightMatrix(geometry.num_pixels(), geometry.num_units(), quantum) {}

    [[nodiscard]] std::size_t num_pixels() const noexcept { return num_pixels_; }
    [[nodiscard]] std::size_t num_units() const noexcept { return num_units_; }
    [[nodiscard]] std::uint32_t quantum() const noexcept { return quantum_; }

    [[nodiscard]] bool is_set(std::size_t pixel, std::size_t unit) const noexcept {
        const auto bit = pixel * words_per_row_ * 64 + unit;
        return (bits_[bit >> 6] >> (bit & 63)) & 1u;
    }
    [[nodiscard]] std::uint32_t weight(std::size_t pixel, std::size_t unit) const noexcept {
        return is_set(pixel, unit) ? quantum_ : 0;
    }

    /// Returns true when the bit was previously clear.
    bool set(std::size_t pixel, std::size_t unit) noexcept;

    [[nodiscard]] std::span<const std::uint64_t> row(std::size_t pixel) const noexcept {
        return {bits_.data() + pixel * words_per_row_, words_per_row_};
    }

    [[nodiscard]] std::size_t count_set() const noexcept;

    /// Contiguous LSB-first packing of bit (pixel * num_units + unit), no row padding.
    [[nodiscard]] std::vector<std::uint8_t> pack() const;
    /// Inverse of pack(); throws StructuralError on size mismatch.
    static WeightMatrix unpack(std::span<const std::uint8_t> bytes, std::size_t num_pixels,
                               std::size_t num_units, std::uint32_t quantum);
    [[nodiscard]] static std::size_t packed_size(std::size_t num_pixels,
                                                 std::size_t num_units) noexcept {
        return (num_pixels * num_units + 7) / 8;
    }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;

private:
    std::size_t num_pixels_ = 0;
    std::size_t num_units_ = 0;
    std::size_t words_per_row_ = 0;
    std::uint32_t quantum_ = kDefaultWeightQuantum;
    std::vector<std::uint64_t> bits_;
};

}  // namespace msdc
