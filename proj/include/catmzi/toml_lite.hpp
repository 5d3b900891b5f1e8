#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace catmzi {

// Parses the TOML subset used by run configs into JSON: # comments,
// [dotted.table] headers, dotted and quoted keys, basic and literal
// strings, booleans, integers, floats, single-line arrays and inline
// tables.  Dates, multi-line strings and table arrays are rejected.
nlohmann::json parse_toml(const std::string& text);

// Reads a config file as JSON, choosing the parser by extension
// (.json / .toml); other extensions are sniffed by the first
// non-space character.
nlohmann::json load_config_file(const std::string& path);

} // namespace catmzi
