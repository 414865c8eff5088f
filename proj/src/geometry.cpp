#include "msdc/geometry.hpp"

#include <string>

#include "msdc/error.hpp"

namespace msdc {

void ModelGeometry::validate() const {
    if (input_width == 0 || input_height == 0) {
        throw ConfigError("input grid must be non-empty");
    }
    if (num_active < 1) {
        throw ConfigError("num_active (S) must be at least 1");
    }
    if (num_active > num_pixels()) {
        throw ConfigError("num_active (S) = " + std::to_string(num_active) +
                          " exceeds pixel count " + std::to_string(num_pixels()));
    }
    if (num_cms < 1 || units_per_cm < 1) {
        throw ConfigError("num_cms (Q) and units_per_cm (K) must be at least 1");
    }
}

}  // namespace msdc
