#include "lathresh/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "lathresh/rng.hpp"

namespace lathresh {

Mixture action_to_mixture(std::span<const double> action) {
    if (action.size() % 3 != 0 || action.empty())
        throw std::invalid_argument("action vector must hold 3 values per class");
    Mixture mix;
    mix.components.reserve(action.size() / 3);
    for (std::size_t i = 0; i < action.size(); i += 3) {
        GaussianComponent c;
        c.p = action[i];
        c.sigma = std::max(action[i + 1], kSigmaFloor);
        c.mu = action[i + 2];
        mix.components.push_back(c);
    }
    return mix;
}

std::vector<double> mixture_to_action(const Mixture& mix) {
    std::vector<double> action;
    action.reserve(mix.components.size() * 3);
    for (const auto& c : mix.components) {
        action.push_back(c.p);
        action.push_back(c.sigma);
        action.push_back(c.mu);
    }
    return action;
}

namespace {

const char* param_kind_name(int slot) {
    switch (slot) {
        case 0: return "p";
        case 1: return "sigma";
        default: return "mu";
    }
}

void write_snapshots(const LaConfig& cfg, const std::vector<Automaton>& team, int iter) {
    for (std::size_t j = 0; j < team.size(); ++j) {
        const int cls = static_cast<int>(j) / 3 + 1;
        const std::string name = "density_" + std::string(param_kind_name(j % 3)) +
                                 std::to_string(cls) + "_" + std::to_string(iter) + ".csv";
        std::ofstream out(cfg.snapshot_dir / name);
        if (!out) throw std::runtime_error("cannot write density snapshot " + name);
        write_density_csv(team[j].density, out);
    }
}

// First iteration whose running best is within 5% of the final best.
int converge_iteration(const std::vector<TracePoint>& trace, double final_best) {
    const double limit = final_best * 1.05;
    for (std::size_t i = 0; i < trace.size(); ++i)
        if (trace[i].best <= limit) return static_cast<int>(i) + 1;
    return static_cast<int>(trace.size());
}

}  // namespace

FitReport fit_la(const NormalizedHistogram& hist, const LaConfig& cfg) {
    if (cfg.classes < 2)
        throw std::invalid_argument("fit_la: need at least two classes");
    if (cfg.iterations < 1)
        throw std::invalid_argument("fit_la: need at least one iteration");

    const int params = cfg.classes * 3;
    std::vector<Automaton> team;
    std::vector<std::mt19937_64> streams;
    team.reserve(params);
    streams.reserve(params);
    for (int j = 0; j < params; ++j) {
        const ActionBounds bounds = (j % 3 == 0)   ? cfg.bounds_p
                                    : (j % 3 == 1) ? cfg.bounds_sigma
                                                   : cfg.bounds_mu;
        team.push_back(init_uniform(bounds, cfg.density_resolution, cfg.g_w, cfg.g_h));
        streams.emplace_back(stream_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    }

    CostConfig cost_cfg = CostConfig::defaults();
    cost_cfg.omega = cfg.omega;

    ReferenceWindow window(cfg.window_m);
    std::vector<double> action(params);
    std::vector<double> best_action;
    double best_j = std::numeric_limits<double>::infinity();

    FitReport report;
    report.method = "la";
    report.trace.reserve(cfg.iterations);

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        for (int j = 0; j < params; ++j) {
            const double z = uniform53(streams[j]);
            action[j] = select_action(team[j], z);
        }

        const Mixture candidate = action_to_mixture(action);
        const double j_now = cost_j(candidate, hist, cost_cfg);
        if (!std::isfinite(j_now))
            throw std::runtime_error("fit_la: non-finite cost at iteration " +
                                     std::to_string(iter));

        if (j_now < best_j) {
            best_j = j_now;
            best_action = action;
        }
        report.trace.push_back({j_now, best_j});

        window.push(j_now);
        const double beta = compute_beta(window, j_now);
        for (int j = 0; j < params; ++j) update_density(team[j], action[j], beta);

        if (!cfg.snapshot_dir.empty())
            for (int want : cfg.snapshot_iters)
                if (want == iter) write_snapshots(cfg, team, iter);
    }

    report.mixture = action_to_mixture(best_action);
    report.best_action = best_action;
    report.final_j = best_j;
    report.iterations_run = cfg.iterations;
    report.iterations_to_converge = converge_iteration(report.trace, best_j);
    report.density_modes.reserve(params);
    for (const auto& a : team) report.density_modes.push_back(a.density.argmax());
    try {
        report.thresholds = thresholds(report.mixture);
    } catch (const std::invalid_argument&) {
        report.flags.push_back("degenerate_thresholds");
    }
    return report;
}

}  // namespace lathresh
