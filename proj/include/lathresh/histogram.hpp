#ifndef LATHRESH_HISTOGRAM_HPP
#define LATHRESH_HISTOGRAM_HPP

#include <array>
#include <cstdint>
#include <iosfwd>

#include "lathresh/pgm.hpp"

namespace lathresh {

struct Mixture;

// Normalized gray-level histogram: bins sum to 1. total_pixels is 0 for
// synthetic histograms that were not counted from an image.
struct NormalizedHistogram {
    std::array<double, kGrayLevels> bins{};
    std::uint64_t total_pixels = 0;

    double sum() const;
};

NormalizedHistogram compute_histogram(const GrayImage& img);

// Evaluates the mixture density at the integer gray levels and renormalizes,
// discarding whatever mass falls outside [0,255]. Deterministic, noise-free.
NormalizedHistogram synth_histogram(const Mixture& mix);

// CSV interchange: header "gray,h" followed by 256 rows.
void write_histogram_csv(const NormalizedHistogram& hist, std::ostream& out);
NormalizedHistogram read_histogram_csv(std::istream& in);

}  // namespace lathresh

#endif
