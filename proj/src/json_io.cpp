#include "catmzi/json_io.hpp"

#include <fstream>

namespace catmzi {

namespace {

const char* kSchema = "fockstate-v1";

nlohmann::json pack_complex(const Mat& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            data.push_back({m(r, c).real(), m(r, c).imag()});
    return data;
}

std::string structure_name(Structure s) {
    switch (s) {
    case Structure::field: return "field";
    case Structure::atom_field: return "atom_field";
    case Structure::two_mode_field: return "two_mode_field";
    }
    return "field";
}

Structure structure_from_name(const std::string& name) {
    if (name == "field") return Structure::field;
    if (name == "atom_field") return Structure::atom_field;
    if (name == "two_mode_field") return Structure::two_mode_field;
    throw ConfigError("state file: unknown structure '" + name + "'");
}

void check_header(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != kSchema)
        throw ConfigError("state file: missing or unsupported schema (want fockstate-v1)");
    if (!j.contains("structure") || !j.contains("cutoffs") || !j.contains("data"))
        throw ConfigError("state file: structure, cutoffs and data are required");
}

std::vector<cd> unpack_complex(const nlohmann::json& data, size_t expected) {
    if (!data.is_array() || data.size() != expected)
        throw ConfigError("state file: data length does not match the declared cutoffs");
    std::vector<cd> out;
    out.reserve(expected);
    for (const auto& entry : data) {
        if (!entry.is_array() || entry.size() != 2)
            throw ConfigError("state file: data entries must be [re, im] pairs");
        out.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    }
    return out;
}

} // namespace

nlohmann::json to_json(const FockVector& psi) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "vector";
    j["structure"] = psi.modes == 2 ? "two_mode_field" : "field";
    j["cutoffs"] = psi.modes == 2 ? nlohmann::json{psi.na, psi.nb}
                                  : nlohmann::json{psi.na};
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index i = 0; i < psi.amps.size(); ++i)
        data.push_back({psi.amps[i].real(), psi.amps[i].imag()});
    j["data"] = std::move(data);
    return j;
}

nlohmann::json to_json(const DensityMatrix& rho) {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["kind"] = "density";
    j["structure"] = structure_name(rho.structure);
    j["cutoffs"] = rho.structure == Structure::two_mode_field
                       ? nlohmann::json{rho.na, rho.nb}
                       : nlohmann::json{rho.na};
    j["data"] = pack_complex(rho.rho);
    return j;
}

FockVector fock_vector_from_json(const nlohmann::json& j) {
    check_header(j);
    if (j.value("kind", "vector") != "vector")
        throw ConfigError("state file: expected a state vector");
    const Structure s = structure_from_name(j["structure"].get<std::string>());
    if (s == Structure::atom_field)
        throw ConfigError("state file: atom_field states are density matrices");
    const auto& cut = j["cutoffs"];
    FockVector psi;
    psi.modes = s == Structure::two_mode_field ? 2 : 1;
    if (!cut.is_array() || cut.size() != size_t(psi.modes))
        throw ConfigError("state file: cutoffs do not match structure");
    psi.na = cut[0].get<int>();
    psi.nb = psi.modes == 2 ? cut[1].get<int>() : 0;
    if (psi.na < 0 || psi.nb < 0)
        throw ConfigError("state file: cutoffs must be non-negative");
    const auto vals = unpack_complex(j["data"], size_t(psi.dim()));
    psi.amps = Eigen::Map<const Vec>(vals.data(), psi.dim());
    return psi;
}

DensityMatrix density_from_json(const nlohmann::json& j) {
    check_header(j);
    if (j.value("kind", "density") != "density")
        throw ConfigError("state file: expected a density matrix");
    DensityMatrix rho;
    rho.structure = structure_from_name(j["structure"].get<std::string>());
    const auto& cut = j["cutoffs"];
    const size_t want = rho.structure == Structure::two_mode_field ? 2 : 1;
    if (!cut.is_array() || cut.size() != want)
        throw ConfigError("state file: cutoffs do not match structure");
    rho.na = cut[0].get<int>();
    rho.nb = want == 2 ? cut[1].get<int>() : 0;
    if (rho.na < 0 || rho.nb < 0)
        throw ConfigError("state file: cutoffs must be non-negative");
    const int dim = rho.dim_slow() * rho.dim_fast();
    const auto vals = unpack_complex(j["data"], size_t(dim) * size_t(dim));
    rho.rho = Eigen::Map<const Mat>(vals.data(), dim, dim).transpose();
    return rho;
}

StateVariant state_from_json(const nlohmann::json& j) {
    check_header(j);
    const std::string kind = j.value("kind", "");
    if (kind == "vector")
        return fock_vector_from_json(j);
    if (kind == "density")
        return density_from_json(j);
    throw ConfigError("state file: kind must be 'vector' or 'density'");
}

void save_state(const std::string& path, const StateVariant& state) {
    nlohmann::json j = std::visit([](const auto& s) { return to_json(s); }, state);
    write_json_file(path, j);
}

StateVariant load_state(const std::string& path) {
    return state_from_json(read_json_file(path));
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write file: " + path);
    out << text;
    if (!out)
        throw NumericalError("short write: " + path);
}

} // namespace catmzi
