// Acceptance gate for the desk-scale configuration (n_alpha = n_beta
// = 10, Fock cutoff 40).  One verdict line per check.  Checks 02 and
// 05 compare against documented closed-form anchor values whose two
// angle assignments are exchanged relative to what the direct
// computation gives; they are expected to fail and are marked so, and
// the companion checks 02+ and 05+ verify the exchanged assignment.
// Exit status is zero only when every line matches its expected
// outcome.  See README, section "Known discrepancies".

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "catmzi/estimate.hpp"
#include "catmzi/extract.hpp"
#include "catmzi/fisher.hpp"
#include "catmzi/fock.hpp"
#include "catmzi/jy.hpp"
#include "catmzi/lindblad.hpp"
#include "catmzi/metrology.hpp"
#include "catmzi/prep.hpp"
#include "catmzi/rng.hpp"
#include "catmzi/wigner.hpp"

using namespace catmzi;

namespace {

const double kRootTen = std::sqrt(10.0);
constexpr int kCutoff = 40;

int checks = 0;
int unexpected = 0;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

void report(const char* label, bool pass, bool expect_pass,
            const std::string& detail) {
    ++checks;
    if (pass != expect_pass)
        ++unexpected;
    std::printf("[%s]%s %s: %s\n", pass ? "PASS" : "FAIL",
                pass == expect_pass ? "" : " UNEXPECTED", label,
                detail.c_str());
    std::fflush(stdout);
}

FockVector ideal_cat(double u0t) {
    PrepParams p;
    p.alpha = kRootTen;
    p.u0 = 1.0;
    p.t = u0t;
    p.cutoff = kCutoff;
    return std::get<FockVector>(prepare_ideal(p).light);
}

InterferometerInput make_input(StateVariant port_a, cd beta) {
    InterferometerInput in;
    in.port_a = std::move(port_a);
    in.beta = beta;
    in.nb_cutoff = kCutoff;
    return in;
}

FockVector random_state(std::uint64_t key, int cutoff) {
    CounterRng rng(key);
    FockVector psi;
    psi.na = cutoff;
    psi.amps = Vec(cutoff + 1);
    for (int n = 0; n <= cutoff; ++n)
        psi.amps[n] = cd(rng.next_double() - 0.5, rng.next_double() - 0.5);
    psi.normalize();
    return psi;
}

// atom (x) field product density with the atom in (|b> + |c>)/sqrt(2)
DensityMatrix atom_field_probe(const FockVector& field) {
    const int d = field.dim();
    Mat atom(2, 2);
    atom << 0.5, 0.5, 0.5, 0.5;
    const Mat f = field.amps * field.amps.adjoint();
    DensityMatrix rho;
    rho.structure = Structure::atom_field;
    rho.na = field.na;
    rho.rho = Mat::Zero(2 * d, 2 * d);
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
            rho.rho.block(s * d, sp * d, d, d) = atom(s, sp) * f;
    return rho;
}

void check_01_preparation() {
    double worst_fid = 0.0, worst_prob = 0.0;
    for (const double u : {M_PI / 4, M_PI / 2, 3 * M_PI / 4, M_PI}) {
        PrepParams p;
        p.alpha = kRootTen;
        p.u0 = 1.0;
        p.t = u;
        p.cutoff = kCutoff;
        const PreparedState prep = prepare_ideal(p);
        const auto& light = std::get<FockVector>(prep.light);
        worst_fid = std::max(worst_fid, 1.0 - fidelity(light, cat_reference(p)));
        worst_prob = std::max(worst_prob,
                              std::abs(prep.success_probability -
                                       ideal_success_probability(10.0, u)));
    }
    report("01 ideal preparation vs coherent-difference reference",
           worst_fid <= 1e-10 && worst_prob <= 1e-10,
           true,
           fmt("worst fidelity deficit %.2e (tol 1e-10), worst success-"
               "probability error %.2e (tol 1e-10)",
               worst_fid, worst_prob));
}

void check_02_anchors() {
    // as documented: 420 at u0t = pi/2 (optimal phase), 120 at u0t = pi
    // (zero reference phase)
    const FockVector cat_half = ideal_cat(M_PI / 2);
    const FockVector cat_pi = ideal_cat(M_PI);
    const PhaseOptimum opt_half =
        optimize_phase_beta(cat_half, kRootTen, 64, kCutoff);
    const double f0_pi = qfi(make_input(cat_pi, kRootTen));
    const double dev_opt = std::abs(opt_half.qfi - 420.0) / 420.0;
    const double dev_zero = std::abs(f0_pi - 120.0) / 120.0;
    report("02 documented anchors, optimal / zero reference phase",
           dev_opt <= 0.05 && dev_zero <= 0.05,
           false,
           fmt("optimal phase at u0t=pi/2: qfi %.4f vs 420 (dev %.0f%%); "
               "zero phase at u0t=pi: qfi %.4f vs 120 (dev %.0f%%); tol 5%%"
               " -- expected failure, see README",
               opt_half.qfi, 100 * dev_opt, f0_pi, 100 * dev_zero));

    // the same two values with the angle assignments exchanged
    ApproxParams ap;
    ap.n_alpha = 10.0;
    ap.n_beta = 10.0;
    ap.u0t = M_PI;
    const double opt_ref = qfi_approx(ApproxFormula::opt, ap);
    ap.u0t = M_PI / 2;
    const double zero_ref = qfi_approx(ApproxFormula::phase0, ap);
    const PhaseOptimum opt_pi =
        optimize_phase_beta(cat_pi, kRootTen, 64, kCutoff);
    const double f0_half = qfi(make_input(cat_half, kRootTen));
    const double dev_opt2 = std::abs(opt_pi.qfi - opt_ref) / opt_ref;
    const double dev_zero2 = std::abs(f0_half - zero_ref) / zero_ref;
    report("02+ same anchors with the angle assignments exchanged",
           dev_opt2 <= 0.05 && dev_zero2 <= 0.05,
           true,
           fmt("optimal phase at u0t=pi: qfi %.4f vs %.0f (phi_beta %.4f); "
               "zero phase at u0t=pi/2: qfi %.4f vs %.0f; tol 5%%",
               opt_pi.qfi, opt_ref, opt_pi.phi_beta, f0_half, zero_ref));
}

void check_03_coherent_baseline() {
    const FockVector port_a = coherent_state(kRootTen, kCutoff);
    const double f = qfi(make_input(port_a, kRootTen));
    const double dev = std::abs(f - 20.0) / 20.0;
    report("03 coherent x coherent probe sits at the shot-noise limit",
           dev <= 1e-6, true,
           fmt("qfi %.10f vs 20, relative deviation %.2e (tol 1e-6)", f, dev));
}

void check_04_spectral_equals_pure() {
    double worst = 0.0;
    CounterRng rng(40);
    for (int k = 0; k < 10; ++k) {
        const double u = 0.3 + (2 * M_PI - 0.6) * rng.next_double();
        const double phi = 2 * M_PI * rng.next_double();
        const FockVector probe = tensor_product(
            ideal_cat(u), coherent_state(std::polar(kRootTen, phi), kCutoff));
        const double fp = qfi_pure(probe);
        const double fm = qfi_mixed(pure_density(probe));
        worst = std::max(worst, std::abs(fm - fp));
    }
    report("04 spectral qfi equals the pure-state form on random probes",
           worst <= 1e-8, true,
           fmt("10 random cat x coherent probes, worst |mixed - pure| "
               "%.2e (tol 1e-8)",
               worst));
}

void check_05_counting_deficit() {
    const double theta = 1e-3; // proxy for theta -> 0

    // as documented: at u0t = pi, zero reference phase, counting is
    // predicted to lose exactly n_alpha relative to the qfi
    const InterferometerInput dark = make_input(ideal_cat(M_PI), kRootTen);
    const MziPropagator prop_dark(dark);
    const double f_dark = qfi(prop_dark);
    const double c_dark = cfi(prop_dark, theta);
    const double predicted_dark = f_dark - 10.0;
    const double dev_dark =
        std::abs(c_dark - predicted_dark) / predicted_dark;
    report("05 documented counting deficit at the dark point",
           dev_dark <= 0.10, false,
           fmt("u0t=pi, phi_beta=0: cfi(theta=1e-3) %.4f vs qfi-10 = %.4f "
               "(dev %.0f%%, tol 10%%) -- expected failure, see README",
               c_dark, predicted_dark, 100 * dev_dark));

    // the same deficit at the exchanged angle
    const InterferometerInput half = make_input(ideal_cat(M_PI / 2), kRootTen);
    const MziPropagator prop_half(half);
    const double f_half = qfi(prop_half);
    const double c_half = cfi(prop_half, theta);
    const double predicted_half = f_half - 10.0;
    const double dev_half =
        std::abs(c_half - predicted_half) / predicted_half;
    report("05+ same deficit at the exchanged angle",
           dev_half <= 0.10, true,
           fmt("u0t=pi/2, phi_beta=0: cfi(theta=1e-3) %.4f vs qfi-10 = %.4f "
               "(dev %.1f%%, tol 10%%)",
               c_half, predicted_half, 100 * dev_half));
}

void check_06_lossy_collapse() {
    const double kappa = 0.05, u0 = 2.0;
    const double tau = lossy_tau(kappa, u0, 10.0);
    double worst_fit = 0.0, f_at_tau = 0.0;
    std::string per_point;
    for (const double f : {0.5, 0.75, 1.0}) {
        PrepParams p;
        p.alpha = kRootTen;
        p.u0 = u0;
        p.t = f * tau;
        p.kappa = kappa;
        p.cutoff = kCutoff;
        const PreparedState prep = prepare_lossy(p);
        const double fq = qfi(make_input(prep.light, kRootTen));
        ApproxParams ap;
        ap.n_alpha = 10.0;
        ap.n_beta = 10.0;
        ap.u0t = u0 * p.t;
        ap.kappa = kappa;
        ap.u0 = u0;
        const double fit = qfi_approx(ApproxFormula::lossy_fit, ap);
        const double dev = std::abs(fq - fit) / fit;
        worst_fit = std::max(worst_fit, dev);
        per_point += fmt("%st/tau=%.2f: %.2f vs fit %.2f", per_point.empty() ? "" : ", ", f, fq, fit);
        if (f == 1.0)
            f_at_tau = fq;
    }
    const double s = std::sin(u0 * tau);
    const double suppression = (f_at_tau - 20.0) / (100.0 * s * s);
    const double target = std::exp(-2.0 / 3.0);
    const double dev_sup = std::abs(suppression - target) / target;
    report("06 lossy preparation follows the collapse-envelope fit",
           worst_fit <= 0.10 && dev_sup <= 0.10, true,
           fmt("%s (worst dev %.1f%%, tol 10%%); interference suppression "
               "at tau: %.4f vs exp(-2/3)=%.4f (dev %.1f%%, tol 10%%)",
               per_point.c_str(), 100 * worst_fit, suppression, target,
               100 * dev_sup));
}

void check_07_pure_loss() {
    const double kappa = 0.05;
    double worst = 0.0;
    for (const double t : {0.8, 2.0}) {
        const DensityMatrix rho0 =
            atom_field_probe(coherent_state(kRootTen, kCutoff));
        const DensityMatrix rho = evolve_dispersive(rho0, 0.0, kappa, t);
        const double n = mean_occupation(partial_trace(rho, Keep::fast));
        const double target = 10.0 * std::exp(-2.0 * kappa * t);
        worst = std::max(worst, std::abs(n - target) / target);
    }
    report("07 dispersive-off evolution is pure photon loss",
           worst <= 1e-6, true,
           fmt("mean occupation vs 10 exp(-2 kappa t) at t={0.8, 2.0}, "
               "worst relative error %.2e (tol 1e-6)",
               worst));
}

void check_08_extraction() {
    PrepParams p;
    p.alpha = kRootTen;
    p.u0 = 1.0;
    p.t = M_PI / 2;
    p.cutoff = kCutoff;
    const PreparedState prep = prepare_ideal(p);
    const auto& cat = std::get<FockVector>(prep.light);

    ExtractionParams full;
    full.kappa_T = 1.0;
    full.tau = M_PI / 2; // kappa_T * tau = pi/2, a full swap
    const DensityMatrix swapped = extract_mode(prep, full);
    const double fid_swap = fidelity(cat, swapped);

    ExtractionParams none;
    none.kappa_T = 1.0;
    none.tau = 0.0;
    const DensityMatrix untouched = extract_mode(prep, none);
    const double fid_vac = fidelity(fock_basis(0, untouched.na), untouched);
    const double f_vac = qfi(make_input(untouched, kRootTen));
    const double dev_q = std::abs(f_vac - 10.0) / 10.0;

    report("08 full swap preserves the state; tau=0 leaves vacuum",
           fid_swap >= 1.0 - 1e-6 && fid_vac >= 1.0 - 1e-6 && dev_q <= 1e-6,
           true,
           fmt("swap fidelity deficit %.2e (tol 1e-6); tau=0 vacuum "
               "fidelity deficit %.2e (tol 1e-6); downstream qfi %.8f vs "
               "10 (rel dev %.2e, tol 1e-6)",
               1.0 - fid_swap, 1.0 - fid_vac, f_vac, dev_q));
}

void check_09_blur() {
    const InterferometerInput in = make_input(ideal_cat(M_PI / 2), kRootTen);
    const MziPropagator prop(in);
    const double theta = 0.05;
    CfiOptions o;
    o.sigma = 0.0;
    const double c0 = cfi(prop, theta, o);
    o.sigma = 1.0;
    const double c1 = cfi(prop, theta, o);
    o.sigma = 5.0;
    const double c5 = cfi(prop, theta, o);
    report("09 detector blur only lowers the counting information",
           c0 >= c1 && c1 >= c5 && c5 < 20.0, true,
           fmt("cfi at sigma={0, 1, 5}: %.4f >= %.4f >= %.4f, and the "
               "widest blur sits below the shot-noise value 20",
               c0, c1, c5));
}

void check_10_wigner() {
    const PhaseGrid grid = PhaseGrid::square(std::sqrt(12.0) + 4.0, 201);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const FockVector a = random_state(1000 + 2 * k, 12);
        const FockVector b = random_state(1001 + 2 * k, 12);
        const double est = wigner_overlap(wigner(a, grid), wigner(b, grid));
        const double exact = std::norm(a.amps.dot(b.amps));
        worst = std::max(worst, std::abs(est - exact) / std::max(exact, 0.02));
    }

    const FockVector cat = ideal_cat(M_PI);
    // w0 is evaluated a hair off the origin so it goes through the
    // general path instead of the exact diagonal sum at zero
    const PhaseGrid origin = PhaseGrid::square(1e-8, 3);
    const double w0 = wigner(cat, origin).values(2, 1);
    double parity = 0.0;
    for (int n = 0; n < cat.dim(); ++n)
        parity += (n % 2 == 0 ? 1.0 : -1.0) * std::norm(cat.amps[n]);
    const double parity_err = std::abs(w0 - (2.0 / M_PI) * parity);

    report("10 wigner overlap, negativity, and parity identities",
           worst <= 0.01 && w0 < 0.0 && parity_err <= 1e-6, true,
           fmt("10 random pure pairs, worst overlap-identity deviation "
               "%.2e (tol 1%%); odd-cat W near 0 = %.6f (< 0); parity-sum "
               "mismatch %.2e (tol 1e-6)",
               worst, w0, parity_err));
}

void check_11_estimation() {
    const InterferometerInput in =
        make_input(ideal_cat(M_PI), std::polar(kRootTen, M_PI / 2));
    const MziPropagator prop(in);
    EstimationConfig cfg;
    cfg.theta_true = 0.05;
    cfg.shots = 1000;
    cfg.trials = 200;
    // a single 200-trial ratio carries ~10% standard error, so one
    // unlucky seed can leave the window; the verdict uses the median
    // over five fixed seeds, which still fails for any systematic
    // variance defect
    std::vector<double> ratios;
    std::string shown;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        cfg.seed = seed;
        const EstimateReport r = run_trials(prop, cfg);
        ratios.push_back(r.ratio);
        shown += fmt("%s%.3f", shown.empty() ? "" : " ", r.ratio);
    }
    std::sort(ratios.begin(), ratios.end());
    const double median = ratios[ratios.size() / 2];
    report("11 ml estimator variance sits near the cramer-rao bound",
           median >= 0.8 && median <= 1.5, true,
           fmt("1000 shots x 200 trials at theta=0.05, seeds 1..5: "
               "variance/crlb = {%s}, median %.3f (window [0.8, 1.5])",
               shown.c_str(), median));
}

void check_12_curvature() {
    const FockVector probe = tensor_product(
        ideal_cat(M_PI), coherent_state(std::polar(kRootTen, M_PI / 2), kCutoff));
    const double f = qfi_pure(probe);
    const auto d = [&](double h) {
        return (1.0 - fidelity(probe, mzi_transform(probe, h))) / (h * h);
    };
    const double r = (100.0 * d(1e-3) - d(1e-2)) / 99.0;
    const double target = f / 4.0;
    const double dev = std::abs(r - target) / target;
    report("12 overlap curvature recovers qfi/4",
           dev <= 1e-3, true,
           fmt("richardson value %.6f vs qfi/4 = %.6f, relative deviation "
               "%.2e (tol 1e-3)",
               r, target, dev));
}

} // namespace

int main() {
    std::printf("acceptance gate: n_alpha = n_beta = 10, cutoff %d\n",
                kCutoff);
    std::printf("(checks 02 and 05 are expected to fail; see README, "
                "\"Known discrepancies\")\n");
    std::fflush(stdout);

    check_01_preparation();
    check_02_anchors();
    check_03_coherent_baseline();
    check_04_spectral_equals_pure();
    check_05_counting_deficit();
    check_06_lossy_collapse();
    check_07_pure_loss();
    check_08_extraction();
    check_09_blur();
    check_10_wigner();
    check_11_estimation();
    check_12_curvature();

    std::printf("%d checks, %d with an unexpected outcome\n", checks,
                unexpected);
    return unexpected == 0 ? 0 : 1;
}
