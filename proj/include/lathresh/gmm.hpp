#ifndef LATHRESH_GMM_HPP
#define LATHRESH_GMM_HPP

#include <span>
#include <vector>

#include "lathresh/histogram.hpp"

namespace lathresh {

struct GaussianComponent {
    double p = 0.0;      // prior probability (class weight)
    double mu = 0.0;     // mean, gray levels
    double sigma = 1.0;  // std deviation, gray levels; > 0
};

// Weighted sum of Gaussian densities over gray levels. The prior sum is not
// forced to 1 here; the fitters keep it near 1 through the cost penalty.
struct Mixture {
    std::vector<GaussianComponent> components;

    int classes() const { return static_cast<int>(components.size()); }
    double prior_sum() const;
};

struct CostConfig {
    double omega = 0.01;           // weight of the |sum(P)-1| penalty
    std::vector<int> domain;       // evaluation gray levels; empty = 0..255

    static CostConfig defaults();
};

double normal_pdf(double x, double mu, double sigma);
double mixture_pdf(const Mixture& mix, double x);

// J = mean squared (pdf - hist) over the domain + omega * |sum(P) - 1|.
double cost_j(const Mixture& mix, const NormalizedHistogram& hist, const CostConfig& cfg);

Mixture sorted_by_mu(const Mixture& mix);

// K-1 ascending integer thresholds. T_i is the smallest integer in
// (mu_i, mu_i+1] where the upper class's weighted density reaches the lower
// one's; midpoint of the means when no crossing exists in the interval.
// Throws when K < 2 or two means coincide within 1e-9.
std::vector<int> thresholds(const Mixture& mix);

// Class index of gray level x: the count of thresholds <= x.
int classify(std::span<const int> thresholds, int x);
int classify(const Mixture& mix, int x);

}  // namespace lathresh

#endif
