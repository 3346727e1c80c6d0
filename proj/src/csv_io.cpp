#include "csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace speclens {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_field(const std::string& field, double& out) {
    const char* begin = field.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<CsvColumn>& columns) {
    if (columns.empty()) throw std::invalid_argument("write_csv: no columns");
    const std::size_t rows = columns.front().values.size();
    for (const auto& column : columns)
        if (column.values.size() != rows)
            throw std::invalid_argument("write_csv: column length mismatch");

    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    for (const auto& comment : comments) out << "# " << comment << "\n";
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c].name;
    out << "\n";
    char buf[48];
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", columns[c].values[r]);
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
    if (!out.flush()) throw std::invalid_argument("failed writing '" + path + "'");
}

XYSeries read_xy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    XYSeries series;
    std::string line;
    bool header_allowed = true;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split_fields(line);
        double x = 0, y = 0;
        if (fields.size() < 2) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected at least two comma-separated fields");
        }
        if (!parse_field(fields[0], x) || !parse_field(fields[1], y)) {
            if (header_allowed) {
                header_allowed = false;  // tolerate one leading header row
                continue;
            }
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": malformed numeric field");
        }
        header_allowed = false;
        series.x.push_back(x);
        series.y.push_back(y);
    }
    if (series.x.empty())
        throw std::invalid_argument(path + ": no data rows");
    return series;
}

}  // namespace speclens
