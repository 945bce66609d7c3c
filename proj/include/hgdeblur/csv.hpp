#ifndef HGDEBLUR_CSV_HPP
#define HGDEBLUR_CSV_HPP

#include <string>
#include <vector>

namespace hgdeblur {

// Fixed CSV schema (version 1): one header row, decimal point, values with
// 17 significant digits so doubles round-trip exactly.

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string format_double(double x);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace hgdeblur

#endif
