#pragma once

#include <json.hpp>

#include <string>

namespace pssf {

// ordered_json keeps insertion order, which makes serialized documents
// byte-stable across runs.
using Json = nlohmann::ordered_json;

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// Single-line dump used for manifest records and hashing.
std::string json_line(const Json& j);

}  // namespace pssf
