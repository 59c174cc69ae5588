#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mcprox {

/// Splits one delimited line; no quoting (none of the formats need it).
std::vector<std::string_view> split_fields(std::string_view line, char delim = ',');

std::string_view trim(std::string_view s);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// Header-addressed delimited table. Lines starting with '#' and blank lines are skipped.
class CsvTable {
public:
    static CsvTable read(std::istream& in, std::string_view source_name);
    static CsvTable read_file(const std::filesystem::path& path);

    /// Column index by name; throws DataError naming the missing column.
    std::size_t require(std::string_view column) const;
    std::optional<std::size_t> find(std::string_view column) const;

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }
    /// 1-based source line of row i, for error messages.
    std::size_t line_of(std::size_t i) const { return lines_[i]; }
    const std::string& source() const { return source_; }

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

/// Opens for reading or throws DataError.
std::ifstream open_input(const std::filesystem::path& path);
/// Creates parent directories, opens for writing or throws DataError.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mcprox
