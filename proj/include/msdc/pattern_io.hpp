#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "msdc/geometry.hpp"
#include "msdc/pattern.hpp"

namespace msdc {

/// Parses either a grid of '0'/'1' rows (height rows of width characters) or
/// JSON: {"active": [i, ...]} or a bare index array. The result is checked
/// against the geometry. Throws PatternError on malformed content.
InputPattern parse_pattern(std::string_view text, const ModelGeometry& geometry);
InputPattern read_pattern_file(const std::filesystem::path& path, const ModelGeometry& geometry);

std::string format_pattern_grid(const InputPattern& pattern, const ModelGeometry& geometry);

}  // namespace msdc
