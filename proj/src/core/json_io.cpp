#include "pssf/core/json_io.hpp"

#include "pssf/core/types.hpp"

#include <fstream>

namespace pssf {

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::config("cannot open json file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error::config("invalid json in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error::runtime("write failure: " + path);
}

std::string json_line(const Json& j) {
    return j.dump();
}

}  // namespace pssf
