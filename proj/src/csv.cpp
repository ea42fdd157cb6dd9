#include "lmsharq/csv.hpp"

#include "lmsharq/errors.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <limits>

namespace lmsharq::csv {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::string format(double value, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

std::string format_exact(double value)
{
    return format(value, std::numeric_limits<double>::max_digits10);
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw DataError("CSV column '" + std::string(name) + "' not found");
}

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.emplace_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

Table read(std::istream& in)
{
    Table table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto content = trim(line);
        if (content.empty() || content.front() == '#')
            continue;
        auto fields = split(content);
        if (!have_header) {
            for (const auto& f : fields) {
                double ignored;
                const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), ignored);
                if (ec == std::errc() && ptr == f.data() + f.size())
                    throw DataError("CSV header row required (line " + std::to_string(line_no) +
                                    " is numeric)");
            }
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw DataError("CSV line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header)
        throw DataError("CSV input is empty (header row required)");
    return table;
}

double to_double(std::string_view field, std::string_view what)
{
    const auto f = trim(field);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty())
        throw DataError("cannot parse " + std::string(what) + " from '" + std::string(field) + "'");
    return value;
}

long long to_integer(std::string_view field, std::string_view what)
{
    const auto f = trim(field);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc() || ptr != f.data() + f.size() || f.empty())
        throw DataError("cannot parse " + std::string(what) + " from '" + std::string(field) + "'");
    return value;
}

} // namespace lmsharq::csv
