#ifndef LATHRESH_BASELINES_HPP
#define LATHRESH_BASELINES_HPP

#include <optional>
#include <vector>

#include "lathresh/report.hpp"

namespace lathresh {

struct EmConfig {
    int max_iter = 2000;
    double tol = 1e-9;          // absolute log-likelihood change stop
    double sigma_floor = 1e-2;  // keeps degenerate spikes evaluable
    std::optional<Mixture> init;
    double omega = 0.01;        // only for the reported cross-method J
};

struct LmConfig {
    int max_iter = 2000;
    double damping_init = 1e-3;
    double damping_factor = 10.0;
    double step_tol = 1e-10;
    double omega = 0.01;
    std::optional<Mixture> init;
};

// Default initialization when no init is given: means at equally spaced
// quantiles of the histogram CDF, equal priors, sigma = 128/(2K).
Mixture quantile_init(const NormalizedHistogram& hist, int classes);

// EM on binned data: responsibilities at each gray level, M-step weighted by
// h(g). The trace records the weighted log-likelihood.
FitReport fit_em(const NormalizedHistogram& hist, int classes, const EmConfig& cfg);

// Levenberg-Marquardt on the smooth surrogate S = sum of squared residuals
// (p(x_j)-h(x_j))/sqrt(n) plus sqrt(omega)*(sum(P)-1). Canonical J (absolute
// penalty) is what the report carries.
FitReport fit_lm(const NormalizedHistogram& hist, int classes, const LmConfig& cfg);

// Residual vector and row-major (n+1) x 3K Jacobian of the LM surrogate,
// exposed so tests can check the analytic derivatives. Parameter order
// matches the action layout: (p, sigma, mu) per component.
std::vector<double> lm_residuals(const Mixture& mix, const NormalizedHistogram& hist,
                                 double omega);
std::vector<double> lm_jacobian(const Mixture& mix, const NormalizedHistogram& hist,
                                double omega);

}  // namespace lathresh

#endif
