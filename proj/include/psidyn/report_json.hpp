#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>

namespace psidyn {

// Reports preserve key insertion order so the emitted bytes are stable.
using Json = nlohmann::ordered_json;

// Serialize with every floating value printed through "%.17g". Shortest
// round-trip printing (what the library's own dump() does) is also exact,
// but pinning the digit count makes reports byte-identical across compilers
// and library versions, which the determinism contract asks for. Non-finite
// doubles serialize as null per JSON rules.
std::string write_json(const Json& j, int indent = 2);

// write_json plus trailing newline, written atomically enough for our needs.
void write_json_file(const std::filesystem::path& path, const Json& j);

} // namespace psidyn
