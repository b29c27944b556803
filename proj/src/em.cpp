#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lathresh/baselines.hpp"
#include "lathresh/segmenter.hpp"

namespace lathresh {

Mixture quantile_init(const NormalizedHistogram& hist, int classes) {
    if (classes < 1) throw std::invalid_argument("init: need at least one class");
    Mixture mix;
    mix.components.resize(classes);
    double cum = 0.0;
    int g = 0;
    for (int i = 0; i < classes; ++i) {
        const double q = (i + 0.5) / classes;
        while (g < kGrayLevels - 1 && cum + hist.bins[g] < q) cum += hist.bins[g], ++g;
        mix.components[i].mu = g;
        mix.components[i].p = 1.0 / classes;
        mix.components[i].sigma = 128.0 / (2.0 * classes);
    }
    // Histograms concentrated on few gray levels can alias quantiles onto the
    // same bin; nudge the means apart so thresholds stay well defined.
    for (int i = 1; i < classes; ++i)
        if (mix.components[i].mu <= mix.components[i - 1].mu)
            mix.components[i].mu = mix.components[i - 1].mu + 1.0;
    return mix;
}

namespace {

double weighted_log_likelihood(const Mixture& mix, const NormalizedHistogram& hist) {
    double ll = 0.0;
    for (int g = 0; g < kGrayLevels; ++g) {
        if (hist.bins[g] == 0.0) continue;
        ll += hist.bins[g] * std::log(std::max(mixture_pdf(mix, g), 1e-300));
    }
    return ll;
}

}  // namespace

FitReport fit_em(const NormalizedHistogram& hist, int classes, const EmConfig& cfg) {
    if (cfg.max_iter < 1) throw std::invalid_argument("fit_em: max_iter must be >= 1");
    Mixture mix = cfg.init ? *cfg.init : quantile_init(hist, classes);
    if (mix.classes() != classes)
        throw std::invalid_argument("fit_em: init does not have K components");

    CostConfig cost_cfg = CostConfig::defaults();
    cost_cfg.omega = cfg.omega;

    FitReport report;
    report.method = "em";
    report.trace_kind = TraceKind::kLogLikelihood;

    const int k = classes;
    std::vector<bool> frozen(k, false);
    std::vector<double> resp(k);
    std::vector<double> w(k), wg(k), wgg(k);
    std::vector<double> cost_trace;
    bool collapsed = false;

    double prev_ll = -std::numeric_limits<double>::infinity();
    double best_ll = -std::numeric_limits<double>::infinity();
    bool reached_tol = false;
    int iter = 0;
    while (iter < cfg.max_iter) {
        ++iter;
        std::fill(w.begin(), w.end(), 0.0);
        std::fill(wg.begin(), wg.end(), 0.0);
        std::fill(wgg.begin(), wgg.end(), 0.0);

        const int active = k - static_cast<int>(std::count(frozen.begin(), frozen.end(), true));
        for (int g = 0; g < kGrayLevels; ++g) {
            const double hg = hist.bins[g];
            if (hg == 0.0) continue;
            double denom = 0.0;
            for (int i = 0; i < k; ++i) {
                resp[i] = mix.components[i].p *
                          normal_pdf(g, mix.components[i].mu, mix.components[i].sigma);
                denom += resp[i];
            }
            if (denom < 1e-300) {
                // No component explains this level; split it evenly so the
                // prior sum stays 1.
                for (int i = 0; i < k; ++i)
                    resp[i] = frozen[i] ? 0.0 : 1.0 / active;
            } else {
                for (int i = 0; i < k; ++i) resp[i] /= denom;
            }
            for (int i = 0; i < k; ++i) {
                if (frozen[i]) continue;
                w[i] += hg * resp[i];
                wg[i] += hg * resp[i] * g;
                wgg[i] += hg * resp[i] * g * g;
            }
        }

        for (int i = 0; i < k; ++i) {
            if (frozen[i]) continue;
            if (w[i] < 1e-12) {
                frozen[i] = true;
                collapsed = true;
                continue;
            }
            const double mu = wg[i] / w[i];
            const double var = wgg[i] / w[i] - mu * mu;  // E[g^2] - mu^2
            mix.components[i].p = w[i];
            mix.components[i].mu = mu;
            mix.components[i].sigma =
                std::sqrt(std::max(var, cfg.sigma_floor * cfg.sigma_floor));
        }

        const double ll = weighted_log_likelihood(mix, hist);
        best_ll = std::max(best_ll, ll);
        report.trace.push_back({ll, best_ll});
        cost_trace.push_back(cost_j(mix, hist, cost_cfg));
        if (std::abs(ll - prev_ll) < cfg.tol) {
            reached_tol = true;
            break;
        }
        prev_ll = ll;
    }

    report.mixture = mix;
    report.best_action = mixture_to_action(mix);
    report.final_j = cost_j(mix, hist, cost_cfg);
    report.iterations_run = iter;
    report.iterations_to_converge = iter;
    for (std::size_t i = 0; i < cost_trace.size(); ++i) {
        if (cost_trace[i] <= report.final_j * 1.05) {
            report.iterations_to_converge = static_cast<int>(i) + 1;
            break;
        }
    }
    if (collapsed) report.flags.push_back("component_collapse");
    if (!reached_tol) report.flags.push_back("max_iter");
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
