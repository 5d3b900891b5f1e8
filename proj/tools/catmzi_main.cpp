// Command-line front end: single-shot physics queries plus batch
// sweeps driven by TOML/JSON config files.
//
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
// Errors are reported as a JSON object on stdout so batch drivers can
// parse them.

#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catmzi/estimate.hpp"
#include "catmzi/extract.hpp"
#include "catmzi/fisher.hpp"
#include "catmzi/prep.hpp"
#include "catmzi/sweep.hpp"
#include "catmzi/toml_lite.hpp"
#include "catmzi/wigner.hpp"

namespace {

using namespace catmzi;

const double kRootTen = std::sqrt(10.0);

struct PrepFlags {
    double alpha = kRootTen;
    double u0 = 1.0;
    double t = M_PI / 2.0;
    double kappa = 0.0;
    int cutoff = -1;
};

void add_prep_flags(CLI::App* cmd, PrepFlags& f) {
    cmd->add_option("--alpha", f.alpha, "cavity coherent amplitude");
    cmd->add_option("--u0", f.u0, "dispersive shift U0");
    cmd->add_option("--t", f.t, "atom-cavity interaction time");
    cmd->add_option("--kappa", f.kappa, "cavity loss rate during preparation");
    cmd->add_option("--cutoff", f.cutoff,
                    "Fock cutoff (-1 picks one from the mean occupation)");
}

PreparedState run_prep(const PrepFlags& f) {
    PrepParams pp;
    pp.alpha = f.alpha;
    pp.u0 = f.u0;
    pp.t = f.t;
    pp.kappa = f.kappa;
    pp.cutoff = f.cutoff;
    return f.kappa > 0 ? prepare_lossy(pp) : prepare_ideal(pp);
}

double light_tail(const StateVariant& s) {
    return std::holds_alternative<FockVector>(s)
               ? truncation_tail_mass(std::get<FockVector>(s))
               : truncation_tail_mass(std::get<DensityMatrix>(s));
}

InterferometerInput make_input(const StateVariant& light, double beta0,
                               double phi_beta, int cutoff) {
    InterferometerInput in;
    in.port_a = light;
    in.beta = std::polar(beta0, phi_beta);
    in.nb_cutoff = cutoff;
    return in;
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

// sweep/validate share the spec-assembly path: config file first,
// then flag overrides, then --set key=value parameter patches.
struct SpecFlags {
    std::string config;
    std::string experiment;
    std::string output;
    bool fail_fast = false;
    std::vector<std::string> sets;
};

void add_spec_flags(CLI::App* cmd, SpecFlags& f, bool output_required) {
    cmd->add_option("--config", f.config, "TOML or JSON sweep spec");
    cmd->add_option("--experiment", f.experiment, "experiment name");
    auto* out = cmd->add_option("--output", f.output, "output directory");
    if (output_required)
        out->description("output directory (required unless the config "
                         "provides output_path)");
    cmd->add_flag("--fail-fast", f.fail_fast,
                  "abort on the first failed grid point");
    cmd->add_option("--set", f.sets,
                    "parameter override, key=value with value a number or "
                    "a {\"min\":..,\"max\":..,\"points\":..} object");
}

SweepSpec assemble_spec(const SpecFlags& f, bool need_output) {
    nlohmann::json j = nlohmann::json::object();
    if (!f.config.empty())
        j = load_config_file(f.config);
    if (!f.experiment.empty())
        j["experiment"] = f.experiment;
    if (!f.output.empty())
        j["output_path"] = f.output;
    if (f.fail_fast)
        j["fail_fast"] = true;
    if (!need_output && !j.contains("output_path"))
        j["output_path"] = "."; // validate never writes
    for (const auto& kv : f.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const nlohmann::json value =
            nlohmann::json::parse(kv.substr(eq + 1), nullptr, false);
        if (value.is_discarded())
            throw ConfigError("--set " + key + ": value is not valid JSON");
        if (!j.contains("parameters"))
            j["parameters"] = nlohmann::json::object();
        j["parameters"][key] = value;
    }
    return sweep_spec_from_json(j);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-Fock cavity-QED interferometry toolkit"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    PrepFlags prep_f;
    std::string prep_out;
    auto* c_prepare =
        app.add_subcommand("prepare", "post-selected cavity state");
    add_prep_flags(c_prepare, prep_f);
    c_prepare->add_option("--output", prep_out, "state JSON file");

    PrepFlags qfi_f;
    double qfi_beta0 = kRootTen, qfi_phi = 0.0;
    bool qfi_opt = false;
    auto* c_qfi = app.add_subcommand(
        "qfi", "quantum Fisher information of the two-port probe");
    add_prep_flags(c_qfi, qfi_f);
    c_qfi->add_option("--beta0", qfi_beta0, "reference coherent amplitude");
    c_qfi->add_option("--phi-beta", qfi_phi, "reference phase");
    c_qfi->add_flag("--optimize-phi", qfi_opt,
                    "scan the reference phase for the maximum");

    PrepFlags cfi_f;
    double cfi_beta0 = kRootTen, cfi_phi = 0.0, cfi_theta = 1e-3,
           cfi_sigma = 0.0;
    auto* c_cfi = app.add_subcommand(
        "cfi", "photon-counting Fisher information at a working point");
    add_prep_flags(c_cfi, cfi_f);
    c_cfi->add_option("--beta0", cfi_beta0, "reference coherent amplitude");
    c_cfi->add_option("--phi-beta", cfi_phi, "reference phase");
    c_cfi->add_option("--theta", cfi_theta, "interferometer phase");
    c_cfi->add_option("--sigma", cfi_sigma, "detector blurring width");

    PrepFlags wig_f;
    double wig_extent = -1.0;
    int wig_points = 201;
    std::string wig_out;
    auto* c_wigner =
        app.add_subcommand("wigner", "Wigner map of the prepared state");
    add_prep_flags(c_wigner, wig_f);
    c_wigner->add_option("--extent", wig_extent,
                         "half-width of the square grid (-1 auto)");
    c_wigner->add_option("--points", wig_points, "grid points per axis");
    c_wigner->add_option("--output", wig_out, "CSV file (re,im,w)")
        ->required();

    PrepFlags sli_f;
    double sli_beta0 = kRootTen, sli_phi = 0.0, sli_theta = 0.0;
    int sli_total = 20;
    std::string sli_out;
    auto* c_slice = app.add_subcommand(
        "slice", "output distribution along a fixed total photon number");
    add_prep_flags(c_slice, sli_f);
    c_slice->add_option("--beta0", sli_beta0, "reference coherent amplitude");
    c_slice->add_option("--phi-beta", sli_phi, "reference phase");
    c_slice->add_option("--theta", sli_theta, "interferometer phase");
    c_slice->add_option("--total", sli_total, "total photon number N");
    c_slice->add_option("--output", sli_out, "CSV file (default stdout)");

    PrepFlags ext_f;
    double ext_kt = 0.0, ext_ktilde = 0.0, ext_tau = 0.0;
    std::string ext_out;
    auto* c_extract = app.add_subcommand(
        "extract", "transfer the cavity state to the travelling mode");
    add_prep_flags(c_extract, ext_f);
    c_extract->add_option("--kappa-t", ext_kt, "transfer rate")->required();
    c_extract->add_option("--kappa-tilde", ext_ktilde,
                          "parasitic loss rate during transfer");
    c_extract->add_option("--tau", ext_tau, "transfer time")->required();
    c_extract->add_option("--output", ext_out, "state JSON file");

    PrepFlags est_f;
    est_f.t = M_PI;
    double est_beta0 = kRootTen, est_phi = M_PI / 2.0, est_theta = 0.05,
           est_sigma = 0.0;
    long est_m = 1000;
    int est_trials = 200;
    std::uint64_t est_seed = 1;
    auto* c_estimate = app.add_subcommand(
        "estimate", "Monte Carlo maximum-likelihood phase estimation");
    add_prep_flags(c_estimate, est_f);
    c_estimate->add_option("--beta0", est_beta0,
                           "reference coherent amplitude");
    c_estimate->add_option("--phi-beta", est_phi, "reference phase");
    c_estimate->add_option("--theta", est_theta, "true phase");
    c_estimate->add_option("--m", est_m, "photon-counting events per trial");
    c_estimate->add_option("--trials", est_trials, "independent trials");
    c_estimate->add_option("--seed", est_seed, "random seed");
    c_estimate->add_option("--sigma", est_sigma, "detector blurring width");

    SpecFlags sweep_f;
    auto* c_sweep =
        app.add_subcommand("sweep", "run a batch experiment from a spec");
    add_spec_flags(c_sweep, sweep_f, true);

    SpecFlags val_f;
    auto* c_validate = app.add_subcommand(
        "validate", "static checks of a sweep spec without running it");
    add_spec_flags(c_validate, val_f, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*c_prepare) {
            const PreparedState st = run_prep(prep_f);
            const nlohmann::json j = to_json(st);
            if (prep_out.empty()) {
                print_json(j);
            } else {
                write_json_file(prep_out, j);
                print_json({{"output", prep_out},
                            {"success_probability", st.success_probability},
                            {"tail_mass", light_tail(st.light)}});
            }
        } else if (*c_qfi) {
            const PreparedState st = run_prep(qfi_f);
            double phi = qfi_phi, f;
            if (qfi_opt) {
                const PhaseOptimum opt =
                    optimize_phase_beta(st.light, qfi_beta0, 64, qfi_f.cutoff);
                phi = opt.phi_beta;
                f = opt.qfi;
            } else {
                f = qfi(make_input(st.light, qfi_beta0, phi, qfi_f.cutoff));
            }
            print_json({{"qfi", f},
                        {"phi_beta", phi},
                        {"snl", qfi_f.alpha * qfi_f.alpha + qfi_beta0 * qfi_beta0},
                        {"success_probability", st.success_probability}});
        } else if (*c_cfi) {
            const PreparedState st = run_prep(cfi_f);
            const MziPropagator prop(
                make_input(st.light, cfi_beta0, cfi_phi, cfi_f.cutoff));
            CfiOptions opt;
            opt.sigma = cfi_sigma;
            print_json({{"cfi", cfi(prop, cfi_theta, opt)},
                        {"theta", cfi_theta},
                        {"sigma", cfi_sigma},
                        {"snl", cfi_f.alpha * cfi_f.alpha + cfi_beta0 * cfi_beta0},
                        {"success_probability", st.success_probability}});
        } else if (*c_wigner) {
            const PreparedState st = run_prep(wig_f);
            const PhaseGrid grid =
                wig_extent > 0 ? PhaseGrid::square(wig_extent, wig_points)
                               : default_grid(wig_f.alpha * wig_f.alpha);
            const WignerMap map = wigner(st.light, grid);
            std::string csv = "re,im,w\n";
            char buf[96];
            for (int a = 0; a < grid.points; ++a)
                for (int b = 0; b < grid.points; ++b) {
                    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n",
                                  grid.re_at(a), grid.im_at(b),
                                  map.values(a, b));
                    csv += buf;
                }
            write_text_file(wig_out, csv);
            print_json({{"output", wig_out},
                        {"wigner_mass", wigner_mass(map)},
                        {"success_probability", st.success_probability}});
        } else if (*c_slice) {
            const PreparedState st = run_prep(sli_f);
            const OutputDistribution dist =
                MziPropagator(
                    make_input(st.light, sli_beta0, sli_phi, sli_f.cutoff))
                    .distribution(sli_theta);
            const SliceRow slice = fixed_total_slice(dist, sli_total);
            std::string csv = "total,theta,delta_n,p\n";
            char buf[96];
            for (std::size_t k = 0; k < slice.p.size(); ++k) {
                std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g\n",
                              slice.total, slice.theta, slice.delta_n[k],
                              slice.p[k]);
                csv += buf;
            }
            if (sli_out.empty())
                std::cout << csv;
            else
                write_text_file(sli_out, csv);
        } else if (*c_extract) {
            const PreparedState st = run_prep(ext_f);
            ExtractionParams xp;
            xp.kappa_T = ext_kt;
            xp.kappa_tilde = ext_ktilde;
            xp.tau = ext_tau;
            const DensityMatrix extracted = extract_mode(st, xp);
            if (!ext_out.empty())
                save_state(ext_out, StateVariant(extracted));
            nlohmann::json j{{"mean_occupation", mean_occupation(extracted)},
                             {"tail_mass", truncation_tail_mass(extracted)},
                             {"success_probability", st.success_probability}};
            if (!ext_out.empty())
                j["output"] = ext_out;
            print_json(j);
        } else if (*c_estimate) {
            const PreparedState st = run_prep(est_f);
            EstimationConfig cfg;
            cfg.theta_true = est_theta;
            cfg.shots = est_m;
            cfg.trials = est_trials;
            cfg.seed = est_seed;
            cfg.sigma = est_sigma;
            const EstimateReport rep = run_trials(
                make_input(st.light, est_beta0, est_phi, est_f.cutoff), cfg);
            print_json(to_json(rep));
        } else if (*c_sweep) {
            const SweepSpec spec = assemble_spec(sweep_f, true);
            const SweepResult result = run_sweep(spec);
            print_json(result.manifest);
        } else if (*c_validate) {
            const SweepSpec spec = assemble_spec(val_f, false);
            print_json(to_json(validate(spec)));
        }
        return 0;
    } catch (const ConfigError& e) {
        print_json({{"error", {{"type", "config"}, {"message", e.what()}}}});
        return 2;
    } catch (const NumericalError& e) {
        print_json({{"error", {{"type", "numerical"}, {"message", e.what()}}}});
        return 3;
    } catch (const std::exception& e) {
        print_json({{"error", {{"type", "internal"}, {"message", e.what()}}}});
        return 3;
    }
}
