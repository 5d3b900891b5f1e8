#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "catmzi/fock.hpp"

namespace catmzi {

// States serialize as
//   { "schema": "fockstate-v1", "kind": "vector"|"density",
//     "structure": "field"|"atom_field"|"two_mode_field",
//     "cutoffs": [na] or [na, nb], "data": [[re, im], ...] }
// with vector data in amplitude order and density data row-major.
nlohmann::json to_json(const FockVector& psi);
nlohmann::json to_json(const DensityMatrix& rho);

FockVector fock_vector_from_json(const nlohmann::json& j);
DensityMatrix density_from_json(const nlohmann::json& j);
StateVariant state_from_json(const nlohmann::json& j);

void save_state(const std::string& path, const StateVariant& state);
StateVariant load_state(const std::string& path);

// File helpers shared by the CLI and sweep writers.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_text_file(const std::string& path, const std::string& text);

} // namespace catmzi
