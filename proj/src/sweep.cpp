#include "catmzi/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "catmzi/estimate.hpp"
#include "catmzi/extract.hpp"
#include "catmzi/fisher.hpp"
#include "catmzi/parallel.hpp"
#include "catmzi/prep.hpp"
#include "catmzi/wigner.hpp"

namespace catmzi {

namespace {

const double kDefaultAmplitude = std::sqrt(10.0);

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::vector<double> linspace(double lo, double hi, int points) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(lo);
        return out;
    }
    for (int k = 0; k < points; ++k)
        out.push_back(lo + k * (hi - lo) / (points - 1));
    return out;
}

// Typed access to the parameter map; shape violations were already
// reported by validate(), so these throw the same messages.
class Params {
public:
    explicit Params(const nlohmann::json& obj) : obj_(obj) {}

    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key, double fallback) const {
        if (!obj_.contains(key))
            return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number())
            throw ConfigError("parameter '" + key + "' must be a number");
        return v.get<double>();
    }

    long integer(const std::string& key, long fallback) const {
        if (!obj_.contains(key))
            return fallback;
        const auto& v = obj_.at(key);
        if (!v.is_number_integer())
            throw ConfigError("parameter '" + key + "' must be an integer");
        return v.get<long>();
    }

    std::vector<double> axis(const std::string& key, double lo, double hi,
                             int points) const {
        if (!obj_.contains(key))
            return linspace(lo, hi, points);
        const auto& v = obj_.at(key);
        if (v.is_number())
            return {v.get<double>()};
        if (!v.is_object() || !v.contains("min") || !v.contains("max") ||
            !v.contains("points") || !v["min"].is_number() ||
            !v["max"].is_number() || !v["points"].is_number_integer())
            throw ConfigError("parameter '" + key +
                              "' must be a number or a {min, max, points} range");
        const int n = v["points"].get<int>();
        if (n < 1)
            throw ConfigError("range '" + key + "': points must be a positive integer");
        return linspace(v["min"].get<double>(), v["max"].get<double>(), n);
    }

private:
    const nlohmann::json& obj_;
};

struct Recipe {
    std::set<std::string> used;
    std::set<std::string> axes;
    std::set<std::string> required;
};

const std::map<std::string, Recipe>& recipes() {
    static const std::map<std::string, Recipe> reg = {
        {"qfi_vs_time",
         {{"alpha", "beta0", "U0", "t", "cutoff"}, {"t"}, {}}},
        {"fisher_vs_time",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "theta", "cutoff"},
          {"t"},
          {}}},
        {"qfi_heatmap_alpha_time",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "kappa", "cutoff"},
          {"alpha", "t"},
          {}}},
        {"photon_distribution",
         {{"alpha", "U0", "t", "kappa", "cutoff"}, {}, {}}},
        {"polar_slice",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "theta", "N_slice",
           "cutoff"},
          {"theta"},
          {}}},
        {"wigner_gallery",
         {{"alpha", "U0", "t", "kappa", "cutoff"}, {"t"}, {}}},
        {"detector_noise",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "theta", "sigma",
           "cutoff"},
          {"t", "sigma"},
          {}}},
        {"extraction_heatmap",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "kappa", "kappa_T",
           "kappa_tilde", "tau", "cutoff"},
          {"t", "tau"},
          {"kappa_T"}}},
        {"estimate",
         {{"alpha", "beta0", "phi_beta", "U0", "t", "theta", "kappa", "sigma",
           "seed", "m", "trials", "cutoff"},
          {},
          {}}},
    };
    return reg;
}

const std::set<std::string>& global_keys() {
    static const std::set<std::string> keys = {
        "alpha",   "beta0",   "phi_beta",    "U0",  "t",       "kappa",
        "sigma",   "kappa_T", "kappa_tilde", "tau", "theta",   "N_slice",
        "cutoff",  "seed",    "m",           "trials"};
    return keys;
}

const std::set<std::string>& integer_keys() {
    static const std::set<std::string> keys = {"N_slice", "cutoff", "seed",
                                               "m", "trials"};
    return keys;
}

PreparedState make_prep(double alpha, double u0, double t, double kappa,
                        int cutoff) {
    PrepParams pp;
    pp.alpha = alpha;
    pp.u0 = u0;
    pp.t = t;
    pp.kappa = kappa;
    pp.cutoff = cutoff;
    return kappa > 0 ? prepare_lossy(pp) : prepare_ideal(pp);
}

double light_tail(const StateVariant& s) {
    return std::holds_alternative<FockVector>(s)
               ? truncation_tail_mass(std::get<FockVector>(s))
               : truncation_tail_mass(std::get<DensityMatrix>(s));
}

struct PointRun {
    nlohmann::json params = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<std::string> rows;
};

// Runs the points in parallel, collecting per-point manifest entries;
// a failed point contributes an entry (and no rows) unless fail_fast
// is set, in which case its original exception propagates.
nlohmann::json execute_points(
    std::size_t n, bool fail_fast,
    const std::function<void(std::size_t, PointRun&)>& body,
    std::vector<std::vector<std::string>>& rows_out) {
    std::vector<nlohmann::json> entries(n);
    rows_out.assign(n, {});
    std::vector<std::exception_ptr> errors(n);
    parallel_for(n, [&](std::size_t i) {
        PointRun pr;
        try {
            body(i, pr);
            entries[i] = nlohmann::json{{"index", i},
                                        {"status", "ok"},
                                        {"params", pr.params},
                                        {"diagnostics", pr.diagnostics}};
            rows_out[i] = std::move(pr.rows);
        } catch (const std::exception& e) {
            entries[i] = nlohmann::json{{"index", i},
                                        {"status", "failed"},
                                        {"params", pr.params},
                                        {"error", e.what()}};
            errors[i] = std::current_exception();
        }
    });
    if (fail_fast)
        for (const auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    nlohmann::json arr = nlohmann::json::array();
    for (auto& e : entries)
        arr.push_back(std::move(e));
    return arr;
}

struct FileOut {
    std::string name;
    std::string text;
};

struct ExperimentOutput {
    std::vector<FileOut> files;
    nlohmann::json points = nlohmann::json::array();
};

std::string join_csv(const std::string& header,
                     const std::vector<std::vector<std::string>>& rows) {
    std::size_t total = header.size() + 1;
    for (const auto& block : rows)
        for (const auto& r : block)
            total += r.size() + 1;
    std::string out;
    out.reserve(total);
    out += header;
    out += '\n';
    for (const auto& block : rows)
        for (const auto& r : block) {
            out += r;
            out += '\n';
        }
    return out;
}

ExperimentOutput run_qfi_vs_time(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double u0 = p.number("U0", 1.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto ts = p.axis("t", 0.0, 2.0 * M_PI, 64);
    struct Curve {
        const char* label;
        bool optimize;
        double phi;
    };
    const std::vector<Curve> curves = {{"opt", true, 0.0},
                                       {"0", false, 0.0},
                                       {"pi/4", false, M_PI / 4},
                                       {"pi/2", false, M_PI / 2}};
    const double snl = alpha * alpha + beta0 * beta0;
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        curves.size() * ts.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const Curve& c = curves[i / ts.size()];
            const double t = ts[i % ts.size()];
            pr.params = {{"curve", c.label}, {"t", t}, {"u0t", u0 * t}};
            const PreparedState st = make_prep(alpha, u0, t, 0.0, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            pr.diagnostics["tail_mass"] = light_tail(st.light);
            double phi = c.phi;
            double f;
            if (c.optimize) {
                const PhaseOptimum opt =
                    optimize_phase_beta(st.light, beta0, 64, cutoff);
                phi = opt.phi_beta;
                f = opt.qfi;
            } else {
                InterferometerInput in;
                in.port_a = st.light;
                in.beta = std::polar(beta0, phi);
                in.nb_cutoff = cutoff;
                f = qfi(in);
            }
            pr.rows.push_back(g17(u0 * t) + "," + c.label + "," + g17(phi) +
                              "," + g17(f) + "," + g17(snl));
        },
        rows);
    out.files.push_back({"data.csv", join_csv("u0t,curve,phi_beta,qfi,snl", rows)});
    return out;
}

ExperimentOutput run_fisher_vs_time(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double phi = p.number("phi_beta", 0.0);
    const double theta = p.number("theta", 1e-3);
    const double u0 = p.number("U0", 1.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto ts = p.axis("t", 0.0, 2.0 * M_PI, 64);
    const double snl = alpha * alpha + beta0 * beta0;
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        ts.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const double t = ts[i];
            pr.params = {{"t", t}, {"u0t", u0 * t}, {"theta", theta}};
            const PreparedState st = make_prep(alpha, u0, t, 0.0, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            pr.diagnostics["tail_mass"] = light_tail(st.light);
            InterferometerInput in;
            in.port_a = st.light;
            in.beta = std::polar(beta0, phi);
            in.nb_cutoff = cutoff;
            const MziPropagator prop(in);
            const double fc = cfi(prop, theta);
            const double fq = qfi(prop);
            pr.rows.push_back(g17(u0 * t) + "," + g17(theta) + "," + g17(fc) +
                              "," + g17(fq) + "," + g17(snl));
        },
        rows);
    out.files.push_back({"data.csv", join_csv("u0t,theta,cfi,qfi,snl", rows)});
    return out;
}

ExperimentOutput run_qfi_heatmap(const Params& p, bool fail_fast) {
    const double u0 = p.number("U0", 2.0);
    const double kappa = p.number("kappa", 0.05);
    const double phi = p.number("phi_beta", 0.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto alphas = p.axis("alpha", 1.0, 6.0, 6);
    const double t_hi = u0 > 0 ? M_PI / u0 : M_PI;
    const auto ts = p.axis("t", 0.0, t_hi, 9);
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        alphas.size() * ts.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const double alpha = alphas[i / ts.size()];
            const double t = ts[i % ts.size()];
            const double beta0 = p.number("beta0", alpha);
            pr.params = {{"alpha", alpha}, {"t", t}, {"u0t", u0 * t}};
            const PreparedState st = make_prep(alpha, u0, t, kappa, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            pr.diagnostics["tail_mass"] = light_tail(st.light);
            InterferometerInput in;
            in.port_a = st.light;
            in.beta = std::polar(beta0, phi);
            in.dim_guard = 1 << 15;
            const double f = qfi(in);
            ApproxParams ap;
            ap.n_alpha = alpha * alpha;
            ap.n_beta = beta0 * beta0;
            ap.u0t = u0 * t;
            ap.kappa = kappa;
            ap.u0 = u0;
            const double fit =
                kappa > 0 && u0 > 0 && alpha > 0
                    ? qfi_approx(ApproxFormula::lossy_fit, ap)
                    : qfi_approx(ApproxFormula::phase0, ap);
            pr.rows.push_back(g17(alpha) + "," + g17(u0 * t) + "," + g17(f) +
                              "," + g17(fit) + "," +
                              g17(alpha * alpha + beta0 * beta0));
        },
        rows);
    out.files.push_back(
        {"data.csv", join_csv("alpha,u0t,qfi,qfi_fit,snl", rows)});
    return out;
}

ExperimentOutput run_photon_distribution(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double u0 = p.number("U0", 2.0);
    const double t = p.number("t", M_PI / 2.0);
    const double kappa = p.number("kappa", 0.05);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const std::vector<std::pair<const char*, double>> variants = {
        {"ideal", 0.0}, {"lossy", kappa}};
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        variants.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const auto& [label, kap] = variants[i];
            pr.params = {{"variant", label}, {"u0t", u0 * t}, {"kappa", kap}};
            const PreparedState st = make_prep(alpha, u0, t, kap, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            pr.diagnostics["tail_mass"] = light_tail(st.light);
            if (std::holds_alternative<FockVector>(st.light)) {
                const auto& psi = std::get<FockVector>(st.light);
                for (int n = 0; n <= psi.na; ++n)
                    pr.rows.push_back(std::string(label) + "," +
                                      std::to_string(n) + "," +
                                      g17(std::norm(psi.amps[n])));
            } else {
                const auto& rho = std::get<DensityMatrix>(st.light);
                for (int n = 0; n <= rho.na; ++n)
                    pr.rows.push_back(std::string(label) + "," +
                                      std::to_string(n) + "," +
                                      g17(rho.rho(n, n).real()));
            }
        },
        rows);
    out.files.push_back({"data.csv", join_csv("variant,n,p", rows)});
    return out;
}

ExperimentOutput run_polar_slice(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double phi = p.number("phi_beta", 0.0);
    const double u0 = p.number("U0", 1.0);
    const double t = p.number("t", M_PI / 2.0);
    const int total = static_cast<int>(p.integer("N_slice", 20));
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto thetas = p.axis("theta", 0.0, 2.0 * M_PI, 128);
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        thetas.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const double theta = thetas[i];
            pr.params = {{"theta", theta}, {"u0t", u0 * t}, {"total", total}};
            const PreparedState st = make_prep(alpha, u0, t, 0.0, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            InterferometerInput in;
            in.port_a = st.light;
            in.beta = std::polar(beta0, phi);
            in.nb_cutoff = cutoff;
            const OutputDistribution dist =
                MziPropagator(in).distribution(theta);
            const SliceRow slice = fixed_total_slice(dist, total);
            double mass = 0.0;
            for (std::size_t k = 0; k < slice.p.size(); ++k) {
                mass += slice.p[k];
                pr.rows.push_back(g17(theta) + "," + std::to_string(total) +
                                  "," + std::to_string(slice.delta_n[k]) +
                                  "," + g17(slice.p[k]));
            }
            pr.diagnostics["slice_mass"] = mass;
        },
        rows);
    out.files.push_back({"data.csv", join_csv("theta,total,delta_n,p", rows)});
    return out;
}

ExperimentOutput run_wigner_gallery(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double u0 = p.number("U0", 1.0);
    const double kappa = p.number("kappa", 0.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto ts = p.axis("t", M_PI / 4.0, M_PI, 4);
    const PhaseGrid grid = default_grid(alpha * alpha);
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> names(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "wigner_%02zu.csv", i);
        names[i] = buf;
    }
    out.points = execute_points(
        ts.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const double t = ts[i];
            pr.params = {{"t", t}, {"u0t", u0 * t}, {"file", names[i]}};
            const PreparedState st = make_prep(alpha, u0, t, kappa, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            const WignerMap map = wigner(st.light, grid);
            pr.diagnostics["wigner_mass"] = wigner_mass(map);
            pr.rows.reserve(static_cast<std::size_t>(grid.points) *
                            grid.points);
            for (int a = 0; a < grid.points; ++a)
                for (int b = 0; b < grid.points; ++b)
                    pr.rows.push_back(g17(grid.re_at(a)) + "," +
                                      g17(grid.im_at(b)) + "," +
                                      g17(map.values(a, b)));
        },
        rows);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (rows[i].empty())
            continue; // failed point, no file
        out.files.push_back(
            {names[i], join_csv("re,im,w", {rows[i]})});
    }
    return out;
}

ExperimentOutput run_detector_noise(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double phi = p.number("phi_beta", 0.0);
    const double theta = p.number("theta", 0.05);
    const double u0 = p.number("U0", 1.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const auto ts = p.axis("t", 0.0, 2.0 * M_PI, 64);
    const std::vector<double> sigmas =
        p.has("sigma") ? p.axis("sigma", 0.0, 0.0, 1)
                       : std::vector<double>{0.0, 1.0, 5.0};
    const double snl = alpha * alpha + beta0 * beta0;
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        sigmas.size() * ts.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const double sigma = sigmas[i / ts.size()];
            const double t = ts[i % ts.size()];
            pr.params = {{"sigma", sigma}, {"t", t}, {"u0t", u0 * t}};
            const PreparedState st = make_prep(alpha, u0, t, 0.0, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            InterferometerInput in;
            in.port_a = st.light;
            in.beta = std::polar(beta0, phi);
            in.nb_cutoff = cutoff;
            CfiOptions opt;
            opt.sigma = sigma;
            const double fc = cfi(MziPropagator(in), theta, opt);
            pr.rows.push_back(g17(sigma) + "," + g17(u0 * t) + "," +
                              g17(theta) + "," + g17(fc) + "," + g17(snl));
        },
        rows);
    out.files.push_back(
        {"data.csv", join_csv("sigma,u0t,theta,cfi,snl", rows)});
    return out;
}

ExperimentOutput run_extraction_heatmap(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double u0 = p.number("U0", 2.0);
    const double kappa = p.number("kappa", 0.05);
    const double kappa_T = p.number("kappa_T", 0.0);
    const double kappa_tilde = p.number("kappa_tilde", 0.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    const double t_hi = u0 > 0 ? M_PI / u0 : M_PI;
    const auto ts = p.axis("t", t_hi / 4.0, t_hi, 4);
    const auto taus = p.axis("tau", 0.0, M_PI / (2.0 * kappa_T), 4);
    const double snl = alpha * alpha + beta0 * beta0;

    // one preparation per interaction time, shared across the tau axis
    std::vector<std::optional<PreparedState>> preps(ts.size());
    std::vector<std::exception_ptr> prep_errors(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        try {
            preps[i] = make_prep(alpha, u0, ts[i], kappa, cutoff);
        } catch (...) {
            prep_errors[i] = std::current_exception();
        }
    }
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    out.points = execute_points(
        ts.size() * taus.size(), fail_fast,
        [&](std::size_t i, PointRun& pr) {
            const std::size_t it = i / taus.size();
            const double t = ts[it];
            const double tau = taus[i % taus.size()];
            pr.params = {{"t", t},
                         {"u0t", u0 * t},
                         {"tau", tau},
                         {"kt_tau", kappa_T * tau}};
            if (prep_errors[it])
                std::rethrow_exception(prep_errors[it]);
            const PreparedState& st = *preps[it];
            pr.diagnostics["success_probability"] = st.success_probability;
            ExtractionParams xp;
            xp.kappa_T = kappa_T;
            xp.kappa_tilde = kappa_tilde;
            xp.tau = tau;
            const DensityMatrix extracted = extract_mode(st, xp);
            pr.diagnostics["extracted_occupation"] =
                mean_occupation(extracted);
            double phi, f;
            if (p.has("phi_beta")) {
                phi = p.number("phi_beta", 0.0);
                InterferometerInput in;
                in.port_a = extracted;
                in.beta = std::polar(beta0, phi);
                in.nb_cutoff = cutoff;
                f = qfi(in);
            } else {
                const PhaseOptimum opt = optimize_phase_beta(
                    StateVariant(extracted), beta0, 64, cutoff);
                phi = opt.phi_beta;
                f = opt.qfi;
            }
            pr.rows.push_back(g17(u0 * t) + "," + g17(tau) + "," +
                              g17(kappa_T * tau) + "," + g17(phi) + "," +
                              g17(f) + "," + g17(st.success_probability) +
                              "," + g17(snl));
        },
        rows);
    out.files.push_back(
        {"data.csv",
         join_csv("u0t,tau,kt_tau,phi_beta,qfi,success_probability,snl",
                  rows)});
    return out;
}

ExperimentOutput run_estimate(const Params& p, bool fail_fast) {
    const double alpha = p.number("alpha", kDefaultAmplitude);
    const double beta0 = p.number("beta0", kDefaultAmplitude);
    const double phi = p.number("phi_beta", M_PI / 2.0);
    const double u0 = p.number("U0", 1.0);
    const double t = p.number("t", M_PI);
    const double kappa = p.number("kappa", 0.0);
    const int cutoff = static_cast<int>(p.integer("cutoff", -1));
    EstimationConfig cfg;
    cfg.theta_true = p.number("theta", 0.05);
    cfg.shots = p.integer("m", 1000);
    cfg.trials = static_cast<int>(p.integer("trials", 200));
    cfg.seed = static_cast<std::uint64_t>(p.integer("seed", 1));
    cfg.sigma = p.number("sigma", 0.0);
    ExperimentOutput out;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json report;
    out.points = execute_points(
        1, fail_fast,
        [&](std::size_t, PointRun& pr) {
            pr.params = {{"u0t", u0 * t},
                         {"theta_true", cfg.theta_true},
                         {"m", cfg.shots},
                         {"trials", cfg.trials},
                         {"seed", cfg.seed}};
            const PreparedState st = make_prep(alpha, u0, t, kappa, cutoff);
            pr.diagnostics["success_probability"] = st.success_probability;
            InterferometerInput in;
            in.port_a = st.light;
            in.beta = std::polar(beta0, phi);
            in.nb_cutoff = cutoff;
            const EstimateReport rep = run_trials(in, cfg);
            pr.diagnostics["ratio"] = rep.ratio;
            report = to_json(rep);
            report["config"] = {{"theta_true", cfg.theta_true},
                                {"m", cfg.shots},
                                {"trials", cfg.trials},
                                {"seed", cfg.seed},
                                {"sigma", cfg.sigma},
                                {"u0t", u0 * t},
                                {"phi_beta", phi},
                                {"alpha", alpha},
                                {"beta0", beta0}};
            pr.rows.reserve(rep.estimates.size());
            for (std::size_t k = 0; k < rep.estimates.size(); ++k)
                pr.rows.push_back(std::to_string(k) + "," +
                                  g17(rep.estimates[k]));
        },
        rows);
    if (!report.is_null()) {
        out.files.push_back(
            {"estimates.csv", join_csv("trial,estimate", rows)});
        out.files.push_back({"report.json", report.dump(2) + "\n"});
    }
    return out;
}

ExperimentOutput dispatch(const SweepSpec& spec) {
    const Params p(spec.parameters);
    if (spec.experiment == "qfi_vs_time")
        return run_qfi_vs_time(p, spec.fail_fast);
    if (spec.experiment == "fisher_vs_time")
        return run_fisher_vs_time(p, spec.fail_fast);
    if (spec.experiment == "qfi_heatmap_alpha_time")
        return run_qfi_heatmap(p, spec.fail_fast);
    if (spec.experiment == "photon_distribution")
        return run_photon_distribution(p, spec.fail_fast);
    if (spec.experiment == "polar_slice")
        return run_polar_slice(p, spec.fail_fast);
    if (spec.experiment == "wigner_gallery")
        return run_wigner_gallery(p, spec.fail_fast);
    if (spec.experiment == "detector_noise")
        return run_detector_noise(p, spec.fail_fast);
    if (spec.experiment == "extraction_heatmap")
        return run_extraction_heatmap(p, spec.fail_fast);
    if (spec.experiment == "estimate")
        return run_estimate(p, spec.fail_fast);
    throw ConfigError("unknown experiment '" + spec.experiment + "'");
}

} // namespace

SweepSpec sweep_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("sweep spec must be a table");
    SweepSpec s;
    for (const auto& [key, value] : j.items()) {
        if (key == "experiment") {
            if (!value.is_string())
                throw ConfigError("experiment must be a string");
            s.experiment = value.get<std::string>();
        } else if (key == "parameters") {
            if (!value.is_object())
                throw ConfigError("parameters must be a table");
            s.parameters = value;
        } else if (key == "output_path") {
            if (!value.is_string())
                throw ConfigError("output_path must be a string");
            s.output_path = value.get<std::string>();
        } else if (key == "fail_fast") {
            if (!value.is_boolean())
                throw ConfigError("fail_fast must be a boolean");
            s.fail_fast = value.get<bool>();
        } else {
            throw ConfigError("unknown spec field '" + key + "'");
        }
    }
    if (s.experiment.empty())
        throw ConfigError("spec needs an 'experiment' field");
    if (s.output_path.empty())
        throw ConfigError("spec needs an 'output_path' field");
    return s;
}

nlohmann::json to_json(const std::vector<Diagnostic>& diags) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : diags)
        arr.push_back({{"severity", d.error ? "error" : "warning"},
                       {"message", d.message}});
    return arr;
}

std::vector<Diagnostic> validate(const SweepSpec& spec) {
    std::vector<Diagnostic> out;
    const auto err = [&](std::string m) { out.push_back({true, std::move(m)}); };
    const auto warn = [&](std::string m) {
        out.push_back({false, std::move(m)});
    };
    const auto& reg = recipes();
    const auto it = reg.find(spec.experiment);
    if (it == reg.end()) {
        err("unknown experiment '" + spec.experiment + "'");
        return out;
    }
    if (spec.output_path.empty())
        err("output_path is required");
    if (!spec.parameters.is_object()) {
        err("parameters must be a table");
        return out;
    }
    const Recipe& rec = it->second;
    bool shapes_ok = true;
    for (const auto& [key, value] : spec.parameters.items()) {
        if (!global_keys().count(key)) {
            warn("unknown parameter '" + key + "'");
            continue;
        }
        if (!rec.used.count(key)) {
            warn("parameter '" + key + "' is not used by " + spec.experiment);
            continue;
        }
        if (value.is_object()) {
            if (!rec.axes.count(key)) {
                err("parameter '" + key + "' must be a scalar");
                shapes_ok = false;
                continue;
            }
            if (!value.contains("min") || !value.contains("max") ||
                !value.contains("points")) {
                err("range '" + key + "' needs min, max and points");
                shapes_ok = false;
                continue;
            }
            if (!value["min"].is_number() || !value["max"].is_number()) {
                err("range '" + key + "': min and max must be numbers");
                shapes_ok = false;
                continue;
            }
            if (!value["points"].is_number_integer() ||
                value["points"].get<long>() < 1) {
                err("range '" + key + "': points must be a positive integer");
                shapes_ok = false;
                continue;
            }
            for (const auto& [rk, rv] : value.items()) {
                (void)rv;
                if (rk != "min" && rk != "max" && rk != "points")
                    warn("range '" + key + "': unknown field '" + rk + "'");
            }
            if (value["min"].get<double>() > value["max"].get<double>()) {
                err("range '" + key + "': min exceeds max");
                shapes_ok = false;
            }
        } else if (value.is_number()) {
            if (integer_keys().count(key) && !value.is_number_integer()) {
                err("parameter '" + key + "' must be an integer");
                shapes_ok = false;
            }
        } else {
            err("parameter '" + key +
                "' must be a number or a {min, max, points} range");
            shapes_ok = false;
        }
    }
    for (const auto& req : rec.required)
        if (!spec.parameters.contains(req))
            err("missing parameter '" + req + "'");
    if (!shapes_ok)
        return out;

    try {
        const Params p(spec.parameters);
        std::vector<double> alphas;
        if (rec.axes.count("alpha"))
            alphas = p.axis("alpha", 1.0, 6.0, 6);
        else
            alphas = {p.number("alpha", kDefaultAmplitude)};
        double alpha_max = 0.0;
        bool alpha_neg = false;
        for (const double a : alphas) {
            alpha_max = std::max(alpha_max, a);
            alpha_neg = alpha_neg || a < 0;
        }
        if (alpha_neg)
            err("alpha must be non-negative");
        const long cutoff = p.integer("cutoff", -1);
        const double nbar = alpha_max * alpha_max;
        const int resolved =
            cutoff > 0 ? static_cast<int>(cutoff) : default_cutoff(nbar);
        const double tail = poisson_tail(nbar, resolved);
        if (tail > 1e-10) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3g", tail);
            warn("predicted tail mass above 1e-10: alpha=" + g17(alpha_max) +
                 " with cutoff " + std::to_string(resolved) + " discards " +
                 buf);
        }
        if (p.number("beta0", kDefaultAmplitude) < 0)
            err("beta0 must be non-negative");
        if (p.number("kappa", 0.0) < 0)
            err("kappa must be non-negative");
        if (p.has("kappa_T") && !(p.number("kappa_T", 0.0) > 0))
            err("kappa_T must be positive");
        const double ktilde = p.number("kappa_tilde", 0.0);
        if (ktilde < 0)
            err("kappa_tilde must be non-negative");
        else if (ktilde > 0)
            warn("kappa_tilde > 0 integrates a dense two-mode density; "
                 "expect minutes per grid point");
        for (const char* key : {"t", "tau"}) {
            if (!rec.used.count(key) || !p.has(key))
                continue;
            for (const double v : p.axis(key, 0.0, 0.0, 1))
                if (v < 0) {
                    err(std::string(key) + " must be non-negative");
                    break;
                }
        }
        if (rec.used.count("sigma") && p.has("sigma"))
            for (const double v : p.axis("sigma", 0.0, 0.0, 1))
                if (v < 0) {
                    err("sigma must be non-negative");
                    break;
                }
        if (spec.experiment == "estimate") {
            if (p.integer("m", 1000) < 1)
                err("m must be a positive integer");
            if (p.integer("trials", 200) < 2)
                err("trials must be at least 2");
        }
        if (spec.experiment == "polar_slice" && p.integer("N_slice", 20) < 0)
            err("N_slice must be non-negative");
    } catch (const ConfigError& e) {
        err(e.what());
    }
    return out;
}

std::string canonical_spec_text(const SweepSpec& spec) {
    const nlohmann::json j{{"experiment", spec.experiment},
                           {"fail_fast", spec.fail_fast},
                           {"parameters", spec.parameters}};
    return j.dump();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string spec_hash_hex(const SweepSpec& spec) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64(canonical_spec_text(spec))));
    return std::string(buf);
}

SweepResult run_sweep(const SweepSpec& spec) {
    const auto diags = validate(spec);
    std::string errors;
    for (const auto& d : diags)
        if (d.error)
            errors += (errors.empty() ? "" : "; ") + d.message;
    if (!errors.empty())
        throw ConfigError("invalid sweep spec: " + errors);

    namespace fs = std::filesystem;
    fs::create_directories(spec.output_path);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentOutput xo = dispatch(spec);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    SweepResult result;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& f : xo.files)
        outputs.push_back(f.name);
    nlohmann::json manifest{{"schema", kManifestSchema},
                            {"tool_version", kToolVersion},
                            {"experiment", spec.experiment},
                            {"spec_hash", spec_hash_hex(spec)},
                            {"fail_fast", spec.fail_fast},
                            {"parameters", spec.parameters},
                            {"outputs", outputs},
                            {"points", xo.points},
                            {"wall_clock_seconds", elapsed}};
    for (const auto& f : xo.files) {
        const std::string path = (fs::path(spec.output_path) / f.name).string();
        write_text_file(path, f.text);
        result.output_files.push_back(path);
    }
    const std::string mpath =
        (fs::path(spec.output_path) / "manifest.json").string();
    write_json_file(mpath, manifest);
    result.output_files.push_back(mpath);
    result.manifest = std::move(manifest);
    return result;
}

} // namespace catmzi
