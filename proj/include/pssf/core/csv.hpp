#pragma once

#include <string>
#include <vector>

namespace pssf {

// Shortest round-trip decimal representation (std::to_chars); parsing the
// string back yields the identical double, and formatting is locale-free.
std::string format_double(double v);

std::string csv_escape(const std::string& field);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

}  // namespace pssf
