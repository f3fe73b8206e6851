#include <fmt/format.h>

#include <boost/algorithm/string.hpp>
#include <fstream>
#include <sstream>

#include "msssn/error.hpp"
#include "msssn/world/world.hpp"

namespace msssn {

std::vector<LayoutRow> parse_layout_csv(std::string_view text, const Rect& field) {
    std::vector<LayoutRow> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        boost::algorithm::trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cols;
        boost::algorithm::split(cols, line, boost::is_any_of(","));
        for (auto& c : cols) boost::algorithm::trim(c);
        if (lineno == 1 && !cols.empty() && cols[0] == "id") continue;
        if (cols.size() < 3 || cols.size() > 4) {
            throw ParseError(fmt::format("layout line {}: expected id,x,y[,energy], got '{}'", lineno, line));
        }
        LayoutRow row;
        try {
            row.id = std::stoi(cols[0]);
            row.pos = {std::stod(cols[1]), std::stod(cols[2])};
            if (cols.size() == 4 && !cols[3].empty()) row.energy = std::stod(cols[3]);
        } catch (const std::exception&) {
            throw ParseError(fmt::format("layout line {}: non-numeric field in '{}'", lineno, line));
        }
        if (!std::isfinite(row.pos.x) || !std::isfinite(row.pos.y) || !field.contains(row.pos)) {
            throw InvalidArgument(fmt::format("layout line {}: ({}, {}) outside field", lineno, row.pos.x, row.pos.y));
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<LayoutRow> load_layout_csv(const std::string& path, const Rect& field) {
    std::ifstream f(path);
    if (!f) throw ParseError(fmt::format("cannot open layout file '{}'", path));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_layout_csv(ss.str(), field);
}

}  // namespace msssn
