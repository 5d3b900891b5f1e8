#include "catmzi/metrology.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace catmzi {

namespace {

// Convolves a count table with the 1d kernel g (length 2R+1) along
// both axes.  Output indices run R above the input ones; mass that
// would land below zero is dropped.
Eigen::ArrayXXd blur_table(const Eigen::ArrayXXd& in, const Eigen::ArrayXd& g,
                           int R) {
    const int rows = static_cast<int>(in.rows());
    const int cols = static_cast<int>(in.cols());
    Eigen::ArrayXXd mid = Eigen::ArrayXXd::Zero(rows + R, cols);
    for (int n = 0; n < rows; ++n)
        for (int k = 0; k <= 2 * R; ++k) {
            const int np = n + k - R;
            if (np >= 0)
                mid.row(np) += g[k] * in.row(n);
        }
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(rows + R, cols + R);
    for (int m = 0; m < cols; ++m)
        for (int k = 0; k <= 2 * R; ++k) {
            const int mp = m + k - R;
            if (mp >= 0)
                out.col(mp) += g[k] * mid.col(m);
        }
    return out;
}

Eigen::ArrayXd blur_kernel(double sigma, int R) {
    Eigen::ArrayXd g(2 * R + 1);
    for (int k = 0; k <= 2 * R; ++k) {
        const double d = k - R;
        g[k] = std::exp(-0.5 * d * d / (sigma * sigma));
    }
    return g;
}

int blur_radius(double sigma) {
    return static_cast<int>(std::ceil(6.0 * sigma));
}

} // namespace

FisherReport make_fisher_report(double theta, double qfi, double cfi,
                                long repetitions) {
    if (repetitions < 1)
        throw ConfigError("fisher report: repetitions must be at least 1");
    FisherReport r;
    r.theta = theta;
    r.qfi = qfi;
    r.cfi = cfi;
    r.repetitions = repetitions;
    r.crlb = 1.0 / std::sqrt(static_cast<double>(repetitions) * qfi);
    return r;
}

nlohmann::json to_json(const FisherReport& r) {
    return nlohmann::json{{"theta", r.theta},
                          {"qfi", r.qfi},
                          {"cfi", r.cfi},
                          {"repetitions", r.repetitions},
                          {"crlb", r.crlb}};
}

MziPropagator::MziPropagator(const InterferometerInput& input) {
    auto [w, vecs] = state_eigenpairs(input.port_a);
    if (w.empty())
        throw ConfigError("interferometer: port-a state carries no weight");
    na_ = static_cast<int>(vecs.front().size()) - 1;
    nb_ = input.nb_cutoff > 0 ? input.nb_cutoff
                              : default_cutoff(std::norm(input.beta));
    const long dim = static_cast<long>(na_ + 1) * (nb_ + 1);
    if (dim > input.dim_guard)
        throw ConfigError("interferometer: two-mode dimension " +
                          std::to_string(dim) + " exceeds limit " +
                          std::to_string(input.dim_guard));
    const FockVector ref = coherent_state(input.beta, nb_);
    weights_ = std::move(w);
    vectors_.reserve(weights_.size());
    for (auto& v : vecs) {
        FockVector a;
        a.modes = 1;
        a.na = na_;
        a.amps = std::move(v);
        vectors_.push_back(tensor_product(a, ref, input.dim_guard));
    }
    jy_ = JyOperator::build(na_, nb_);
}

OutputDistribution MziPropagator::distribution(double theta) const {
    OutputDistribution out;
    out.theta = theta;
    out.probs = Eigen::ArrayXXd::Zero(na_ + 1, nb_ + 1);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const FockVector r = jy_.rotate(vectors_[i], theta);
        for (int n = 0; n <= na_; ++n)
            for (int m = 0; m <= nb_; ++m)
                out.probs(n, m) += weights_[i] * std::norm(r.amps[r.index(n, m)]);
    }
    return out;
}

void MziPropagator::distribution_and_derivative(double theta,
                                                Eigen::ArrayXXd& p,
                                                Eigen::ArrayXXd& dp) const {
    p = Eigen::ArrayXXd::Zero(na_ + 1, nb_ + 1);
    dp = Eigen::ArrayXXd::Zero(na_ + 1, nb_ + 1);
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const FockVector r = jy_.rotate(vectors_[i], theta);
        const FockVector jr = jy_.apply(r);
        for (int n = 0; n <= na_; ++n)
            for (int m = 0; m <= nb_; ++m) {
                const int idx = r.index(n, m);
                const cd a = r.amps[idx];
                // d psi / d theta = -i J_y psi
                const cd d = cd(0.0, -1.0) * jr.amps[idx];
                p(n, m) += weights_[i] * std::norm(a);
                dp(n, m) += weights_[i] * 2.0 * (std::conj(a) * d).real();
            }
    }
}

OutputDistribution output_distribution(const InterferometerInput& input,
                                       double theta) {
    return MziPropagator(input).distribution(theta);
}

OutputDistribution blur_distribution(const OutputDistribution& dist,
                                     double sigma) {
    if (sigma < 0)
        throw ConfigError("blur: sigma must be non-negative");
    if (sigma == 0.0)
        return dist;
    const int R = blur_radius(sigma);
    const Eigen::ArrayXd g = blur_kernel(sigma, R);
    Eigen::ArrayXXd q = blur_table(dist.probs, g, R);
    const double total = q.sum();
    if (!(total > 0))
        throw NumericalError("blur: distribution has no mass");
    OutputDistribution out;
    out.theta = dist.theta;
    out.probs = q / total;
    out.blurred = true;
    out.sigma = sigma;
    return out;
}

double cfi(const MziPropagator& prop, double theta, const CfiOptions& opt) {
    if (opt.sigma < 0)
        throw ConfigError("cfi: sigma must be non-negative");
    Eigen::ArrayXXd p, dp;
    prop.distribution_and_derivative(theta, p, dp);
    if (opt.sigma > 0) {
        const int R = blur_radius(opt.sigma);
        const Eigen::ArrayXd g = blur_kernel(opt.sigma, R);
        const Eigen::ArrayXXd q = blur_table(p, g, R);
        const Eigen::ArrayXXd dq = blur_table(dp, g, R);
        const double total = q.sum();
        if (!(total > 0))
            throw NumericalError("cfi: blurred distribution has no mass");
        const double dtotal = dq.sum();
        // renormalized: d(q/S) = dq/S - q dS/S^2
        p = q / total;
        dp = dq / total - q * (dtotal / (total * total));
    }
    double f = 0.0;
    for (Eigen::Index j = 0; j < p.cols(); ++j)
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            if (p(i, j) > opt.p_floor)
                f += dp(i, j) * dp(i, j) / p(i, j);
    return f;
}

double cfi(const InterferometerInput& input, double theta,
           const CfiOptions& opt) {
    return cfi(MziPropagator(input), theta, opt);
}

SliceRow fixed_total_slice(const OutputDistribution& dist, int total) {
    const int rows = static_cast<int>(dist.probs.rows());
    const int cols = static_cast<int>(dist.probs.cols());
    if (total < 0 || total > rows - 1 + cols - 1)
        throw ConfigError("slice: total photon number " + std::to_string(total) +
                          " is outside the stored count range");
    SliceRow row;
    row.total = total;
    row.theta = dist.theta;
    for (int n = std::max(0, total - (cols - 1)); n <= std::min(rows - 1, total); ++n) {
        row.delta_n.push_back(2 * n - total);
        row.p.push_back(dist.probs(n, total - n));
    }
    return row;
}

} // namespace catmzi
