#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lathresh/baselines.hpp"
#include "lathresh/segmenter.hpp"

namespace lathresh {

std::vector<double> lm_residuals(const Mixture& mix, const NormalizedHistogram& hist,
                                 double omega) {
    const int n = kGrayLevels;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> r(n + 1);
    for (int g = 0; g < n; ++g)
        r[g] = (mixture_pdf(mix, g) - hist.bins[g]) * inv_sqrt_n;
    r[n] = std::sqrt(omega) * (mix.prior_sum() - 1.0);
    return r;
}

std::vector<double> lm_jacobian(const Mixture& mix, const NormalizedHistogram& hist,
                                double omega) {
    (void)hist;  // residual offsets do not enter the derivatives
    const int n = kGrayLevels;
    const int k = mix.classes();
    const int cols = 3 * k;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<double> jac(static_cast<std::size_t>(n + 1) * cols, 0.0);
    for (int g = 0; g < n; ++g) {
        double* row = jac.data() + static_cast<std::size_t>(g) * cols;
        for (int i = 0; i < k; ++i) {
            const auto& c = mix.components[i];
            const double ni = normal_pdf(g, c.mu, c.sigma);
            const double d = g - c.mu;
            const double s2 = c.sigma * c.sigma;
            row[3 * i + 0] = ni * inv_sqrt_n;
            row[3 * i + 1] = c.p * ni * (d * d / (s2 * c.sigma) - 1.0 / c.sigma) * inv_sqrt_n;
            row[3 * i + 2] = c.p * ni * d / s2 * inv_sqrt_n;
        }
    }
    double* last = jac.data() + static_cast<std::size_t>(n) * cols;
    for (int i = 0; i < k; ++i) last[3 * i + 0] = std::sqrt(omega);
    return jac;
}

namespace {

double surrogate_s(const Mixture& mix, const NormalizedHistogram& hist, double omega) {
    double s = 0.0;
    for (double r : lm_residuals(mix, hist, omega)) s += r * r;
    return s;
}

Mixture clamp_to_bounds(Mixture mix) {
    for (auto& c : mix.components) {
        c.p = std::clamp(c.p, 0.0, 0.5);
        c.sigma = std::clamp(c.sigma, 1e-4, 128.0);
        c.mu = std::clamp(c.mu, 0.0, 255.0);
    }
    return mix;
}

Mixture apply_step(const Mixture& mix, const Eigen::VectorXd& delta) {
    Mixture next = mix;
    for (int i = 0; i < mix.classes(); ++i) {
        next.components[i].p += delta[3 * i + 0];
        next.components[i].sigma += delta[3 * i + 1];
        next.components[i].mu += delta[3 * i + 2];
    }
    return clamp_to_bounds(next);
}

}  // namespace

FitReport fit_lm(const NormalizedHistogram& hist, int classes, const LmConfig& cfg) {
    if (cfg.max_iter < 1) throw std::invalid_argument("fit_lm: max_iter must be >= 1");
    Mixture mix = cfg.init ? clamp_to_bounds(*cfg.init) : quantile_init(hist, classes);
    if (mix.classes() != classes)
        throw std::invalid_argument("fit_lm: init does not have K components");

    CostConfig cost_cfg = CostConfig::defaults();
    cost_cfg.omega = cfg.omega;

    FitReport report;
    report.method = "lm";
    report.trace_kind = TraceKind::kCost;

    const int cols = 3 * classes;
    double lambda = cfg.damping_init;
    double s_cur = surrogate_s(mix, hist, cfg.omega);
    double best_j = cost_j(mix, hist, cost_cfg);
    report.surrogate.push_back(s_cur);

    bool stalled = false;
    bool converged = false;
    int iter = 0;
    while (iter < cfg.max_iter) {
        ++iter;

        const std::vector<double> res = lm_residuals(mix, hist, cfg.omega);
        const std::vector<double> jac = lm_jacobian(mix, hist, cfg.omega);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
            jmat(jac.data(), kGrayLevels + 1, cols);
        Eigen::Map<const Eigen::VectorXd> rvec(res.data(), kGrayLevels + 1);
        const Eigen::MatrixXd a = jmat.transpose() * jmat;
        const Eigen::VectorXd grad = jmat.transpose() * rvec;

        if (grad.lpNorm<Eigen::Infinity>() < 1e-14 || s_cur < 1e-24) {
            converged = true;
            break;
        }

        Eigen::MatrixXd damped = a;
        for (int c = 0; c < cols; ++c)
            damped(c, c) += lambda * std::max(a(c, c), 1e-30);
        const Eigen::VectorXd delta = damped.ldlt().solve(-grad);

        bool accept = delta.allFinite();
        Mixture trial;
        double s_trial = 0.0;
        if (accept) {
            trial = apply_step(mix, delta);
            s_trial = surrogate_s(trial, hist, cfg.omega);
            accept = std::isfinite(s_trial) && s_trial < s_cur;
        }
        if (accept) {
            mix = trial;
            s_cur = s_trial;
            lambda = std::max(lambda / cfg.damping_factor, 1e-15);
            const double j_now = cost_j(mix, hist, cost_cfg);
            best_j = std::min(best_j, j_now);
            report.trace.push_back({j_now, best_j});
            report.surrogate.push_back(s_cur);
            if (delta.norm() < cfg.step_tol) {
                converged = true;
                break;
            }
        } else {
            lambda *= cfg.damping_factor;
            if (lambda > 1e12) {
                // No damped step improves S. With a near-zero gradient that is
                // plain convergence; otherwise report the stall.
                if (grad.lpNorm<Eigen::Infinity>() < 1e-8)
                    converged = true;
                else
                    stalled = true;
                break;
            }
        }
    }

    report.mixture = mix;
    report.best_action = mixture_to_action(mix);
    report.final_j = cost_j(mix, hist, cost_cfg);
    report.iterations_run = iter;
    report.iterations_to_converge = iter;
    for (std::size_t i = 0; i < report.trace.size(); ++i) {
        if (report.trace[i].value <= report.final_j * 1.05) {
            report.iterations_to_converge = static_cast<int>(i) + 1;
            break;
        }
    }
    if (stalled) report.flags.push_back("stalled");
    if (!stalled && !converged) report.flags.push_back("max_iter");
    if (classes >= 2) {
        try {
            report.thresholds = thresholds(report.mixture);
        } catch (const std::invalid_argument&) {
            report.flags.push_back("degenerate_thresholds");
        }
    }
    return report;
}

}  // namespace lathresh
