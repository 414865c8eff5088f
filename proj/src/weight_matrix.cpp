#include "msdc/weight_matrix.hpp"

#include <bit>

#include "msdc/error.hpp"

namespace msdc {

WeightMatrix::WeightMatrix(std::size_t num_pixels, std::size_t num_units, std::uint32_t quantum)
    : num_pixels_(num_pixels),
      num_units_(num_units),
      words_per_row_((num_units + 63) / 64),
      quantum_(quantum),
      bits_(num_pixels * words_per_row_, 0) {
    if (quantum == 0) {
        throw ConfigError("weight quantum must be positive");
    }
}

bool WeightMatrix::set(std::size_t pixel, std::size_t unit) noexcept {
    const auto bit = pixel * words_per_row_ * 64 + unit;
    auto& word = bits_[bit >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (bit & 63);
    const bool was_clear = (word & mask) == 0;
    word |= mask;
    return was_clear;
}

std::size_t WeightMatrix::count_set() const noexcept {
    std::size_t n = 0;
    for (auto w : bits_) {
        n += static_cast<std::size_t>(std::popcount(w));
    }
    return n;
}

std::vector<std::uint8_t> WeightMatrix::pack() const {
    std::vector<std::uint8_t> out(packed_size(num_pixels_, num_units_), 0);
    std::size_t flat = 0;
    for (std::size_t p = 0; p < num_pixels_; ++p) {
        for (std::size_t j = 0; j < num_units_; ++j, ++flat) {
            if (is_set(p, j)) {
                out[flat >> 3] |= static_cast<std::uint8_t>(1u << (flat & 7));
            }
        }
    }
    return out;
}

WeightMatrix WeightMatrix::unpack(std::span<const std::uint8_t> bytes, std::size_t num_pixels,
                                  std::size_t num_units, std::uint32_t quantum) {
    if (bytes.size() != packed_size(num_pixels, num_units)) {
        throw StructuralError("packed weight section has wrong size");
    }
    WeightMatrix m(num_pixels, num_units, quantum);
    std::size_t flat = 0;
    for (std::size_t p = 0; p < num_pixels; ++p) {
        for (std::size_t j = 0; j < num_units; ++j, ++flat) {
            if ((bytes[flat >> 3] >> (flat & 7)) & 1u) {
                m.set(p, j);
            }
        }
    }
    const std::size_t total = num_pixels * num_units;
    if (total % 8 != 0 && (bytes.back() >> (total % 8)) != 0) {
        throw StructuralError("packed weight section has stray padding bits");
    }
    return m;
}

}  // namespace msdc
