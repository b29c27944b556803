#ifndef LATHRESH_REPORT_HPP
#define LATHRESH_REPORT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "lathresh/gmm.hpp"

#include <json.hpp>

namespace lathresh {

enum class TraceKind { kCost, kLogLikelihood };

struct TracePoint {
    double value = 0.0;  // J (or log-likelihood for EM)
    double best = 0.0;   // running best of the above
};

// Common result record of all three fitters.
struct FitReport {
    std::string method;
    Mixture mixture;                   // usable parameters (sigma floored)
    std::vector<double> best_action;   // raw values, (p, sigma, mu) per class
    std::vector<int> thresholds;       // empty when K < 2 or degenerate
    double final_j = 0.0;
    int iterations_run = 0;
    int iterations_to_converge = 0;
    TraceKind trace_kind = TraceKind::kCost;
    std::vector<TracePoint> trace;
    std::vector<double> density_modes;  // la: per-automaton density argmax
    std::vector<double> surrogate;      // lm: accepted-step surrogate values
    std::vector<std::string> flags;     // "component_collapse", "stalled", ...

    bool converged() const { return flags.empty(); }
};

nlohmann::ordered_json mixture_to_json(const Mixture& mix);
Mixture mixture_from_json(const nlohmann::json& j);

nlohmann::ordered_json report_to_json(const FitReport& r);

// "iter,J,best_J" rows ("iter,ll,best_ll" for log-likelihood traces).
void write_trace_csv(const FitReport& r, std::ostream& out);

}  // namespace lathresh

#endif
