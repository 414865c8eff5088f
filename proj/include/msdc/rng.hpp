#pragma once

#include <cstdint>
#include <random>

namespace msdc {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace msdc
