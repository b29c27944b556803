#ifndef LATHRESH_SEGMENTER_HPP
#define LATHRESH_SEGMENTER_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lathresh/carla.hpp"
#include "lathresh/report.hpp"

namespace lathresh {

// Sigma used in place of a near-zero sigma action when evaluating the cost.
// The action itself is never clipped, so reports can still show values
// arbitrarily close to zero.
inline constexpr double kSigmaFloor = 0.5;

struct LaConfig {
    int classes = 4;
    int iterations = 2000;
    double g_w = 0.02;
    double g_h = 0.3;
    double omega = 0.01;
    int window_m = 25;
    std::uint64_t seed = 0;
    ActionBounds bounds_p{0.0, 0.5};
    ActionBounds bounds_sigma{0.0, 128.0};
    ActionBounds bounds_mu{0.0, 255.0};
    int density_resolution = 256;

    // Optional density snapshots, one density_<param>_<iter>.csv per
    // automaton per listed iteration.
    std::filesystem::path snapshot_dir;
    std::vector<int> snapshot_iters;
};

// Action layout: (k_p, k_sigma, k_mu) per class, 3K values total.
Mixture action_to_mixture(std::span<const double> action);
std::vector<double> mixture_to_action(const Mixture& mix);

// Runs the team of 3K automata for cfg.iterations rounds: select one action
// per automaton by inverse CDF, score the assembled mixture, grade the cost
// against the shared reference window, and reinforce every density with the
// same beta. Returns the best mixture ever evaluated plus the full trace.
FitReport fit_la(const NormalizedHistogram& hist, const LaConfig& cfg);

}  // namespace lathresh

#endif
