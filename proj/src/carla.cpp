#include "lathresh/carla.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace lathresh {

double DensityTable::trapezoid_integral() const {
    const double h = step();
    double inner = 0.0;
    for (std::size_t k = 1; k + 1 < values.size(); ++k) inner += values[k];
    return h * (0.5 * values.front() + inner + 0.5 * values.back());
}

double DensityTable::argmax() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best]) best = k;
    return grid_point(static_cast<int>(best));
}

Automaton init_uniform(ActionBounds bounds, int resolution, double g_w, double g_h) {
    if (!(bounds.max > bounds.min) || !std::isfinite(bounds.min) || !std::isfinite(bounds.max))
        throw std::invalid_argument("carla: invalid action bounds");
    if (resolution < 8)
        throw std::invalid_argument("carla: grid resolution must be >= 8");
    if (!(g_w > 0.0) || !(g_h > 0.0))
        throw std::invalid_argument("carla: g_w and g_h must be positive");

    Automaton a;
    a.density.bounds = bounds;
    a.density.values.assign(resolution + 1, 1.0 / bounds.range());
    a.g_w = g_w;
    a.g_h = g_h;
    return a;
}

double select_action(const Automaton& a, double z) {
    if (z < 0.0 || z > 1.0)
        throw std::invalid_argument("carla: z outside [0,1]");
    const DensityTable& d = a.density;
    const double h = d.step();

    // Cumulative trapezoid integral at the grid points.
    std::vector<double> cdf(d.values.size());
    cdf[0] = 0.0;
    for (std::size_t k = 1; k < d.values.size(); ++k)
        cdf[k] = cdf[k - 1] + 0.5 * h * (d.values[k - 1] + d.values[k]);

    if (std::abs(cdf.back() - 1.0) > 1e-6)
        throw std::invalid_argument("carla: density is not normalized");

    if (z <= 0.0) return d.bounds.min;
    if (z >= cdf.back()) return d.bounds.max;

    // First cell whose upper cumulative value exceeds z; flat (zero-density)
    // cells are skipped by construction.
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), z);
    const std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    const double c0 = cdf[k - 1];
    const double c1 = cdf[k];
    const double frac = (z - c0) / (c1 - c0);
    const double x = d.grid_point(static_cast<int>(k - 1)) + frac * h;
    return std::clamp(x, d.bounds.min, d.bounds.max);
}

double neighborhood(const Automaton& a, double x, double r) {
    const double s = a.neighborhood_sigma();
    const double dx = (x - r) / s;
    return a.neighborhood_height() * std::exp(-0.5 * dx * dx);
}

void update_density(Automaton& a, double r, double beta) {
    if (beta == 0.0) return;  // inaction: table stays bit-identical
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("carla: beta outside [0,1]");
    if (r < a.density.bounds.min || r > a.density.bounds.max)
        throw std::invalid_argument("carla: action outside bounds");

    DensityTable& d = a.density;
    for (std::size_t k = 0; k < d.values.size(); ++k)
        d.values[k] += beta * neighborhood(a, d.grid_point(static_cast<int>(k)), r);
    const double alpha = 1.0 / d.trapezoid_integral();
    for (double& v : d.values) v *= alpha;
}

void write_density_csv(const DensityTable& d, std::ostream& out) {
    out << "x,f\n";
    char buf[96];
    for (std::size_t k = 0; k < d.values.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g",
                      d.grid_point(static_cast<int>(k)), d.values[k]);
        out << buf << '\n';
    }
}

ReferenceWindow::ReferenceWindow(int capacity) : capacity_(capacity) {
    if (capacity < 2)
        throw std::invalid_argument("carla: reference window needs capacity >= 2");
}

void ReferenceWindow::push(double cost) {
    if (!std::isfinite(cost) || cost < 0.0)
        throw std::invalid_argument("carla: cost must be finite and non-negative");
    costs_.push_back(cost);
    if (static_cast<int>(costs_.size()) > capacity_) costs_.pop_front();
}

double ReferenceWindow::median() const {
    if (costs_.empty())
        throw std::logic_error("carla: median of empty window");
    std::vector<double> sorted(costs_.begin(), costs_.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    if (sorted.size() % 2 == 0) return 0.5 * (sorted[mid - 1] + sorted[mid]);
    return sorted[mid];
}

double ReferenceWindow::minimum() const {
    if (costs_.empty())
        throw std::logic_error("carla: minimum of empty window");
    return *std::min_element(costs_.begin(), costs_.end());
}

double compute_beta(const ReferenceWindow& w, double cost) {
    if (w.size() == 0)
        throw std::logic_error("carla: beta needs a non-empty window");
    const double med = w.median();
    const double min = w.minimum();
    if (med == min) return cost <= min ? 1.0 : 0.0;
    const double beta = (med - cost) / (med - min);
    return std::clamp(beta, 0.0, 1.0);
}

void discrete_lri_update(DiscreteAutomaton& d, std::size_t chosen, double beta) {
    if (chosen >= d.probs.size())
        throw std::out_of_range("carla: chosen action out of range");
    if (beta < 0.0 || beta > 1.0)
        throw std::invalid_argument("carla: beta outside [0,1]");
    const double step = d.theta * beta;
    for (std::size_t j = 0; j < d.probs.size(); ++j) {
        if (j == chosen)
            d.probs[j] += step * (1.0 - d.probs[j]);
        else
            d.probs[j] -= step * d.probs[j];
    }
}

}  // namespace lathresh
