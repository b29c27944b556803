#ifndef LATHRESH_CARLA_HPP
#define LATHRESH_CARLA_HPP

#include <cstddef>
#include <deque>
#include <iosfwd>
#include <vector>

namespace lathresh {

// Continuous action reinforcement learning automaton: one per model
// parameter. The action probability density lives on a uniform grid over the
// action range; trapezoid quadrature keeps it normalized and a piecewise
// linear CDF inversion selects actions.

struct ActionBounds {
    double min = 0.0;
    double max = 1.0;

    double range() const { return max - min; }
};

struct DensityTable {
    ActionBounds bounds;
    std::vector<double> values;  // D+1 samples at equally spaced grid points

    int resolution() const { return static_cast<int>(values.size()) - 1; }
    double step() const { return bounds.range() / resolution(); }
    double grid_point(int k) const { return bounds.min + k * step(); }
    double trapezoid_integral() const;
    // Grid point holding the largest density sample (ties -> lowest x).
    double argmax() const;
};

struct Automaton {
    DensityTable density;
    double g_w = 0.02;  // neighborhood width factor
    double g_h = 0.3;   // neighborhood height factor

    double neighborhood_sigma() const { return g_w * density.bounds.range(); }
    double neighborhood_height() const { return g_h / density.bounds.range(); }
};

// Uniform density 1/(max-min) at every grid point. resolution >= 8.
Automaton init_uniform(ActionBounds bounds, int resolution, double g_w, double g_h);

// Inverse-CDF action selection for z in [0,1]: locates the grid cell whose
// cumulative integral brackets z and interpolates linearly inside it.
double select_action(const Automaton& a, double z);

// Gaussian reinforcement bump centered on the selected action r.
double neighborhood(const Automaton& a, double x, double r);

// f <- alpha * (f + beta * H(x,r)), renormalized to unit integral. beta = 0
// leaves the table untouched.
void update_density(Automaton& a, double r, double beta);

void write_density_csv(const DensityTable& d, std::ostream& out);

// FIFO of the last m cost values; supplies the median/min reference that
// grades new costs.
class ReferenceWindow {
  public:
    explicit ReferenceWindow(int capacity);

    void push(double cost);
    double median() const;
    double minimum() const;
    std::size_t size() const { return costs_.size(); }
    int capacity() const { return capacity_; }

  private:
    int capacity_;
    std::deque<double> costs_;
};

// beta = max(0, (J_med - J) / (J_med - J_min)), clamped to 1. When the window
// is degenerate (J_med == J_min) the cost either ties the minimum (full
// reward) or does not (none).
double compute_beta(const ReferenceWindow& w, double cost);

// Minimal discrete linear reward/inaction automaton.
struct DiscreteAutomaton {
    std::vector<double> probs;
    double theta = 0.1;  // learning rate in (0,1)
};

void discrete_lri_update(DiscreteAutomaton& d, std::size_t chosen, double beta);

}  // namespace lathresh

#endif
