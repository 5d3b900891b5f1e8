#include "catmzi/prep.hpp"

#include <cmath>

namespace catmzi {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool at_multiple_of_two_pi(double u, double tol = 1e-12) {
    return std::abs(std::remainder(u, kTwoPi)) <= tol;
}

} // namespace

int resolve_cutoff(const PrepParams& p) {
    return p.cutoff > 0 ? p.cutoff : default_cutoff(std::norm(p.alpha));
}

double ideal_success_probability(double n_alpha, double u0t) {
    return 0.5 * (1.0 - std::exp(n_alpha * (std::cos(u0t) - 1.0)) *
                            std::cos(n_alpha * std::sin(u0t)));
}

PreparedState prepare_ideal(const PrepParams& p) {
    const double u = p.u0 * p.t;
    if (at_multiple_of_two_pi(u))
        throw ConfigError("empty post-selection: U0*t is a multiple of 2*pi");
    FockVector psi = coherent_state(p.alpha, resolve_cutoff(p));
    for (int n = 0; n <= psi.na; ++n)
        psi.amps[n] *= cd(0.0, -1.0) * std::exp(cd(0.0, -0.5 * n * u)) *
                       std::sin(0.5 * n * u);
    const double success = psi.norm2();
    if (success < 1e-300)
        throw ConfigError("empty post-selection: the kept branch has no weight");
    psi.amps /= std::sqrt(success);
    return {psi, success};
}

FockVector cat_reference(const PrepParams& p) {
    const double u = p.u0 * p.t;
    if (at_multiple_of_two_pi(u) || std::abs(p.alpha) < 1e-150)
        throw ConfigError("cat_reference: the two coherent components coincide");
    const int cutoff = resolve_cutoff(p);
    const FockVector rotated = coherent_state(p.alpha * std::exp(cd(0.0, -u)), cutoff);
    const FockVector base = coherent_state(p.alpha, cutoff);
    FockVector cat = rotated;
    cat.amps -= base.amps;
    cat.normalize();
    return cat;
}

PreparedState prepare_lossy(const PrepParams& p, const IntegratorConfig& cfg) {
    if (p.kappa < 0)
        throw ConfigError("prepare_lossy: kappa must be non-negative");
    const int cutoff = resolve_cutoff(p);
    const int d = cutoff + 1;

    // (|b> + |c>)/sqrt(2) (x) |alpha>, atom index slowest
    const FockVector field = coherent_state(p.alpha, cutoff);
    Vec init(2 * d);
    init.segment(0, d) = field.amps / std::sqrt(2.0);
    init.segment(d, d) = field.amps / std::sqrt(2.0);

    DensityMatrix rho;
    rho.structure = Structure::atom_field;
    rho.na = cutoff;
    rho.rho = init * init.adjoint();
    rho = evolve_dispersive(rho, p.u0, p.kappa, p.t, cfg);

    // pi/2 pulse |b> -> (|b>+|c>)/sqrt2, |c> -> (-|b>+|c>)/sqrt2,
    // then keep the |b> outcome: <b|U rho U+|b>.
    const Mat b00 = rho.rho.block(0, 0, d, d);
    const Mat b01 = rho.rho.block(0, d, d, d);
    const Mat b10 = rho.rho.block(d, 0, d, d);
    const Mat b11 = rho.rho.block(d, d, d, d);
    Mat kept = 0.5 * (b00 - b01 - b10 + b11);

    const double success = kept.trace().real();
    if (success < 1e-14)
        throw ConfigError("empty post-selection: the kept branch has no weight");
    kept /= success;
    kept = 0.5 * (kept + kept.adjoint()).eval();

    DensityMatrix light;
    light.structure = Structure::field;
    light.na = cutoff;
    light.rho = std::move(kept);
    return {light, success};
}

nlohmann::json to_json(const PreparedState& s) {
    nlohmann::json j = std::visit([](const auto& st) { return to_json(st); }, s.light);
    j["success_probability"] = s.success_probability;
    return j;
}

PreparedState prepared_from_json(const nlohmann::json& j) {
    PreparedState out;
    out.light = state_from_json(j);
    // Plain states without the field are accepted as certain preparations.
    out.success_probability = j.value("success_probability", 1.0);
    if (out.success_probability < 0.0 || out.success_probability > 1.0 + 1e-12)
        throw ConfigError("prepared state: success_probability outside [0, 1]");
    return out;
}

} // namespace catmzi
