#include "msdc/pattern_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "msdc/error.hpp"

namespace msdc {
namespace {

InputPattern parse_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw PatternError(std::string("invalid pattern JSON: ") + e.what());
    }
    const nlohmann::json* list = &doc;
    if (doc.is_object()) {
        if (!doc.contains("active")) throw PatternError("pattern JSON lacks \"active\"");
        list = &doc["active"];
    }
    if (!list->is_array()) throw PatternError("pattern JSON \"active\" must be an array");
    std::vector<std::uint32_t> pixels;
    for (const auto& v : *list) {
        if (!v.is_number_unsigned()) {
            throw PatternError("pattern JSON indices must be non-negative integers");
        }
        pixels.push_back(v.get<std::uint32_t>());
    }
    return InputPattern(std::move(pixels));
}

InputPattern parse_grid(std::string_view text, const ModelGeometry& geometry) {
    std::vector<std::uint32_t> pixels;
    std::uint32_t row = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row >= geometry.input_height) {
            throw PatternError("pattern grid has more than " +
                               std::to_string(geometry.input_height) + " rows");
        }
        if (line.size() != geometry.input_width) {
            throw PatternError("pattern row " + std::to_string(row) + " has " +
                               std::to_string(line.size()) + " columns, expected " +
                               std::to_string(geometry.input_width));
        }
        for (std::uint32_t col = 0; col < geometry.input_width; ++col) {
            const char c = line[col];
            if (c == '1') {
                pixels.push_back(row * geometry.input_width + col);
            } else if (c != '0') {
                throw PatternError(std::string("unexpected character '") + c +
                                   "' in pattern grid");
            }
        }
        ++row;
    }
    if (row != geometry.input_height) {
        throw PatternError("pattern grid has " + std::to_string(row) + " rows, expected " +
                           std::to_string(geometry.input_height));
    }
    return InputPattern(std::move(pixels));
}

}  // namespace

InputPattern parse_pattern(std::string_view text, const ModelGeometry& geometry) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) throw PatternError("empty pattern");
    auto pattern = (text[first] == '{' || text[first] == '[') ? parse_json(text)
                                                              : parse_grid(text, geometry);
    pattern.check_against(geometry);
    return pattern;
}

InputPattern read_pattern_file(const std::filesystem::path& path, const ModelGeometry& geometry) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pattern file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pattern(ss.str(), geometry);
}

std::string format_pattern_grid(const InputPattern& pattern, const ModelGeometry& geometry) {
    std::string out;
    for (std::uint32_t r = 0; r < geometry.input_height; ++r) {
        for (std::uint32_t c = 0; c < geometry.input_width; ++c) {
            out += pattern.contains(r * geometry.input_width + c) ? '1' : '0';
        }
        out += '\n';
    }
    return out;
}

}  // namespace msdc
