#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "lathresh/report.hpp"

namespace lathresh {

namespace {

nlohmann::ordered_json component_json(const GaussianComponent& c) {
    return {{"p", c.p}, {"mu", c.mu}, {"sigma", c.sigma}};
}

}  // namespace

nlohmann::ordered_json mixture_to_json(const Mixture& mix) {
    nlohmann::ordered_json j;
    j["components"] = nlohmann::ordered_json::array();
    for (const auto& c : mix.components) j["components"].push_back(component_json(c));
    j["sorted_by_mu"] = nlohmann::ordered_json::array();
    for (const auto& c : sorted_by_mu(mix).components)
        j["sorted_by_mu"].push_back(component_json(c));
    return j;
}

Mixture mixture_from_json(const nlohmann::json& j) {
    if (!j.contains("components") || !j["components"].is_array())
        throw std::invalid_argument("mixture json: missing components array");
    Mixture mix;
    for (const auto& c : j["components"]) {
        GaussianComponent comp;
        comp.p = c.at("p").get<double>();
        comp.mu = c.at("mu").get<double>();
        comp.sigma = c.at("sigma").get<double>();
        if (!std::isfinite(comp.p) || !std::isfinite(comp.mu) || !std::isfinite(comp.sigma))
            throw std::invalid_argument("mixture json: non-finite component value");
        mix.components.push_back(comp);
    }
    if (mix.components.empty())
        throw std::invalid_argument("mixture json: empty components array");
    return mix;
}

nlohmann::ordered_json report_to_json(const FitReport& r) {
    nlohmann::ordered_json j;
    j["method"] = r.method;
    j["classes"] = r.mixture.classes();
    j["final_J"] = r.final_j;
    j["iterations_run"] = r.iterations_run;
    j["iterations_to_converge"] = r.iterations_to_converge;
    j["converged"] = r.converged();
    j["flags"] = r.flags;
    j["mixture"] = mixture_to_json(r.mixture);
    j["thresholds"] = r.thresholds;
    if (!r.density_modes.empty()) j["density_modes"] = r.density_modes;
    return j;
}

void write_trace_csv(const FitReport& r, std::ostream& out) {
    out << (r.trace_kind == TraceKind::kCost ? "iter,J,best_J\n" : "iter,ll,best_ll\n");
    char buf[80];
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, r.trace[i].value,
                      r.trace[i].best);
        out << buf;
    }
}

}  // namespace lathresh
