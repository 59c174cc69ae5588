#include "mcprox/text_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>

#include "mcprox/error.hpp"

namespace mcprox {

std::vector<std::string_view> split_fields(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    std::string s = buf;
    if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        return std::nullopt;
    return v;
}

CsvTable CsvTable::read(std::istream& in, std::string_view source_name) {
    CsvTable t;
    t.source_ = source_name;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::vector<std::string> fields;
        for (auto f : split_fields(view)) fields.emplace_back(trim(f));
        if (!have_header) {
            t.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header_.size())
            throw DataError(t.source_ + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header_.size()) + " fields, got " + std::to_string(fields.size()));
        t.rows_.push_back(std::move(fields));
        t.lines_.push_back(lineno);
    }
    return t;
}

CsvTable CsvTable::read_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read(in, path.string());
}

std::optional<std::size_t> CsvTable::find(std::string_view column) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == column) return i;
    return std::nullopt;
}

std::size_t CsvTable::require(std::string_view column) const {
    if (auto i = find(column)) return *i;
    throw DataError(source_ + ": missing column \"" + std::string(column) + "\"");
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace mcprox
