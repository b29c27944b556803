#ifndef LATHRESH_BENCH_HPP
#define LATHRESH_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lathresh/baselines.hpp"
#include "lathresh/segmenter.hpp"

namespace lathresh {

// One (method, run) cell of a comparison batch.
struct CompareRow {
    std::string method;
    int run = 0;
    std::uint64_t seed = 0;
    double final_j = 0.0;
    int iters_converge = 0;
    double wall_millis = 0.0;
    std::vector<double> params;  // fitted (p, mu, sigma) per component
    std::vector<double> init;    // initial (p, mu, sigma) per component
    std::string flags;
};

enum class InitMode { kSharedRandom, kFixed, kPerRunRandom };

struct CompareConfig {
    std::vector<std::string> methods;  // subset of {"la","em","lm"}, in order
    int repeats = 1;
    std::uint64_t seed = 0;
    InitMode init_mode = InitMode::kSharedRandom;
    std::optional<Mixture> fixed_init;
    int classes = 4;
    LaConfig la;
    EmConfig em;
    LmConfig lm;
};

// Random but reproducible initial mixture: means uniform over the gray range,
// sigmas uniform in [4,64], near-equal priors normalized to 1.
Mixture random_init(int classes, std::uint64_t seed);

// Runs repeats x methods cells; rows come back in (method, run) order. A
// failed cell becomes a row with a failure flag and NaN metrics.
std::vector<CompareRow> run_compare(const NormalizedHistogram& hist,
                                    const CompareConfig& cfg);

// CSV with header method,run,seed,final_J,iters_converge,wall_millis,
// p1,mu1,sigma1,...,init_p1,init_mu1,init_sigma1,...,flags followed by a
// commented summary block (per-method mean/std of each column).
void write_compare_csv(const std::vector<CompareRow>& rows, int classes,
                       std::ostream& out);
std::vector<CompareRow> read_compare_csv(std::istream& in);

}  // namespace lathresh

#endif
