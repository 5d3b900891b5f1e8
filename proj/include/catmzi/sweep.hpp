#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace catmzi {

inline constexpr const char* kToolVersion = "catmzi 1.0.0";
inline constexpr const char* kManifestSchema = "runmanifest-v1";

// One batch experiment: which figure recipe to run, its parameter
// map (scalars or {min, max, points} ranges), and where the CSV/JSON
// outputs go.
struct SweepSpec {
    std::string experiment;
    nlohmann::json parameters = nlohmann::json::object();
    std::string output_path;
    bool fail_fast = false;
};

SweepSpec sweep_spec_from_json(const nlohmann::json& j);

struct Diagnostic {
    bool error = false; // errors block execution, warnings do not
    std::string message;
};

nlohmann::json to_json(const std::vector<Diagnostic>& diags);

// Static checks without touching the physics: experiment name,
// parameter completeness and shapes, range well-formedness, cutoff
// adequacy for the requested amplitudes, and cost warnings.
std::vector<Diagnostic> validate(const SweepSpec& spec);

// Canonical serialization of the spec (sorted keys, no output path)
// and its 64-bit FNV-1a hash; both are stable under re-serialization
// of the config file.
std::string canonical_spec_text(const SweepSpec& spec);
std::uint64_t fnv1a64(const std::string& text);
std::string spec_hash_hex(const SweepSpec& spec);

struct SweepResult {
    nlohmann::json manifest;
    std::vector<std::string> output_files; // paths written, manifest last
};

// Validates, runs every grid point (failures are recorded in the
// manifest and leave no data rows unless fail_fast is set, in which
// case the first failure propagates), writes the CSV/JSON outputs in
// canonical order and the manifest beside them.
SweepResult run_sweep(const SweepSpec& spec);

} // namespace catmzi
