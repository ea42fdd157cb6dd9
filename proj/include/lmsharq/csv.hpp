#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lmsharq::csv {

/// Shortest general-format rendering with `digits` significant digits.
std::string format(double value, int digits = 6);

/// Round-trippable rendering (max_digits10).
std::string format_exact(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws DataError if absent.
    std::size_t column(std::string_view name) const;
};

/// Comma-separated text with a mandatory header row. Blank lines and lines
/// starting with '#' are skipped. Throws DataError on a missing header or a
/// row whose width differs from the header.
Table read(std::istream& in);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Strict numeric parse: the whole field must be consumed.
double to_double(std::string_view field, std::string_view what);
long long to_integer(std::string_view field, std::string_view what);

} // namespace lmsharq::csv
