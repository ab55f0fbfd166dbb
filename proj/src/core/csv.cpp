#include "pssf/core/csv.hpp"

#include "pssf/core/types.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pssf {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += '"';
    return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot open for writing: " + path);
    auto write_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(row[i]);
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
    if (!out) throw Error::runtime("write failure: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::runtime("cannot open for reading: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_has_data = false;
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        if (table.header.empty()) table.header = row;
        else table.rows.push_back(row);
        row.clear();
        row_has_data = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
            case '"': quoted = true; row_has_data = true; break;
            case ',': end_field(); row_has_data = true; break;
            case '\r': break;
            case '\n':
                if (row_has_data || !field.empty() || !row.empty()) end_row();
                break;
            default: field += ch; row_has_data = true;
        }
    }
    if (row_has_data || !field.empty() || !row.empty()) end_row();
    return table;
}

}  // namespace pssf
