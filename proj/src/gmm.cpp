#include "lathresh/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lathresh {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005;
}

double Mixture::prior_sum() const {
    double s = 0.0;
    for (const auto& c : components) s += c.p;
    return s;
}

CostConfig CostConfig::defaults() {
    CostConfig cfg;
    cfg.domain.resize(kGrayLevels);
    std::iota(cfg.domain.begin(), cfg.domain.end(), 0);
    return cfg;
}

double normal_pdf(double x, double mu, double sigma) {
    const double d = (x - mu) / sigma;
    return std::exp(-0.5 * d * d) / (kSqrt2Pi * sigma);
}

double mixture_pdf(const Mixture& mix, double x) {
    double total = 0.0;
    for (const auto& c : mix.components) total += c.p * normal_pdf(x, c.mu, c.sigma);
    return total;
}

double cost_j(const Mixture& mix, const NormalizedHistogram& hist, const CostConfig& cfg) {
    double sse = 0.0;
    std::size_t n = 0;
    if (cfg.domain.empty()) {
        for (int g = 0; g < kGrayLevels; ++g) {
            const double d = mixture_pdf(mix, g) - hist.bins[g];
            sse += d * d;
        }
        n = kGrayLevels;
    } else {
        for (int g : cfg.domain) {
            const double d = mixture_pdf(mix, g) - hist.bins[g];
            sse += d * d;
        }
        n = cfg.domain.size();
    }
    return sse / static_cast<double>(n) + cfg.omega * std::abs(mix.prior_sum() - 1.0);
}

Mixture sorted_by_mu(const Mixture& mix) {
    Mixture out = mix;
    std::sort(out.components.begin(), out.components.end(),
              [](const GaussianComponent& a, const GaussianComponent& b) { return a.mu < b.mu; });
    return out;
}

std::vector<int> thresholds(const Mixture& mix) {
    if (mix.classes() < 2)
        throw std::invalid_argument("thresholds: need at least two classes");
    const Mixture sorted = sorted_by_mu(mix);
    for (int i = 1; i < sorted.classes(); ++i)
        if (sorted.components[i].mu - sorted.components[i - 1].mu < 1e-9)
            throw std::invalid_argument("thresholds: duplicate component means");

    std::vector<int> result;
    result.reserve(sorted.classes() - 1);
    for (int i = 0; i + 1 < sorted.classes(); ++i) {
        const auto& lo = sorted.components[i];
        const auto& hi = sorted.components[i + 1];
        // Smallest integer in (mu_lo, mu_hi] where the upper class's weighted
        // density reaches the lower one's.
        const int first = static_cast<int>(std::floor(lo.mu)) + 1;
        const int last = static_cast<int>(std::floor(hi.mu));
        int t = -1;
        for (int x = first; x <= last; ++x) {
            if (hi.p * normal_pdf(x, hi.mu, hi.sigma) >=
                lo.p * normal_pdf(x, lo.mu, lo.sigma)) {
                t = x;
                break;
            }
        }
        if (t < 0) t = static_cast<int>(std::lround((lo.mu + hi.mu) / 2.0));
        if (!result.empty() && t <= result.back()) t = result.back() + 1;
        result.push_back(t);
    }
    return result;
}

int classify(std::span<const int> thresholds, int x) {
    int c = 0;
    while (c < static_cast<int>(thresholds.size()) && thresholds[c] <= x) ++c;
    return c;
}

int classify(const Mixture& mix, int x) {
    const auto t = thresholds(mix);
    return classify(t, x);
}

}  // namespace lathresh
