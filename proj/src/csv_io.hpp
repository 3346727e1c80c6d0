#pragma once

#include <string>
#include <vector>

namespace speclens {

struct CsvColumn {
    std::string name;
    std::vector<double> values;
};

// Writes '#'-prefixed comment lines, a header row, then comma-separated data.
// All columns must have equal length.
void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::vector<CsvColumn>& columns);

struct XYSeries {
    std::vector<double> x;
    std::vector<double> y;
};

// Reads the first two columns of a CSV with optional '#' comments and an
// optional non-numeric header row. Malformed rows raise std::invalid_argument
// carrying "path:line:".
XYSeries read_xy_csv(const std::string& path);

}  // namespace speclens
