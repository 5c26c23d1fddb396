#include "quakestat/csv.hpp"

#include <algorithm>
#include <charconv>
#include <istream>

#include "quakestat/errors.hpp"

namespace quakestat::csv {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t Table::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("missing column '" + std::string(name) + "'", 1);
    return static_cast<std::size_t>(it - header.begin());
}

Table read(std::istream& in, const std::vector<std::string>& required) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t header_line = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto fields = split(body);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            header_line = line_no;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ParseError("expected " + std::to_string(t.header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        t.rows.push_back({line_no, std::move(fields)});
    }
    if (!have_header) throw ParseError("empty input: no header line");
    for (const auto& name : required) {
        if (std::find(t.header.begin(), t.header.end(), name) == t.header.end()) {
            throw ParseError("missing column '" + name + "'", header_line);
        }
    }
    return t;
}

double to_double(const Row& row, std::size_t col, std::string_view name) {
    const std::string& f = row.fields.at(col);
    double v = 0.0;
    const char* first = f.data();
    const char* last = f.data() + f.size();
    if (!f.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (f.empty() || ec != std::errc() || ptr != last) {
        throw ParseError("column '" + std::string(name) + "': not a number: '" + f + "'", row.line);
    }
    return v;
}

}  // namespace quakestat::csv
