#include "lathresh/histogram.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "lathresh/gmm.hpp"

namespace lathresh {

double NormalizedHistogram::sum() const {
    return std::accumulate(bins.begin(), bins.end(), 0.0);
}

NormalizedHistogram compute_histogram(const GrayImage& img) {
    if (img.pixels.empty())
        throw std::invalid_argument("histogram: empty image");
    std::array<std::uint64_t, kGrayLevels> counts{};
    for (std::uint8_t p : img.pixels) ++counts[p];

    NormalizedHistogram hist;
    hist.total_pixels = img.pixels.size();
    const double n = static_cast<double>(hist.total_pixels);
    for (int g = 0; g < kGrayLevels; ++g)
        hist.bins[g] = static_cast<double>(counts[g]) / n;
    return hist;
}

NormalizedHistogram synth_histogram(const Mixture& mix) {
    NormalizedHistogram hist;
    double total = 0.0;
    for (int g = 0; g < kGrayLevels; ++g) {
        hist.bins[g] = mixture_pdf(mix, g);
        total += hist.bins[g];
    }
    if (!(total > 0.0))
        throw std::invalid_argument("synth: mixture has no mass on [0,255]");
    for (double& b : hist.bins) b /= total;
    hist.total_pixels = 0;
    return hist;
}

void write_histogram_csv(const NormalizedHistogram& hist, std::ostream& out) {
    out << "gray,h\n";
    char buf[40];
    for (int g = 0; g < kGrayLevels; ++g) {
        // %.17g round-trips doubles exactly
        std::snprintf(buf, sizeof(buf), "%.17g", hist.bins[g]);
        out << g << ',' << buf << '\n';
    }
}

NormalizedHistogram read_histogram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("gray,h", 0) != 0)
        throw std::runtime_error("histogram csv: missing gray,h header");

    NormalizedHistogram hist;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("histogram csv: malformed row " + std::to_string(rows));
        int gray = std::stoi(line.substr(0, comma));
        double h = std::stod(line.substr(comma + 1));
        if (gray != rows || gray >= kGrayLevels)
            throw std::runtime_error("histogram csv: unexpected gray level " + std::to_string(gray));
        if (h < 0.0 || !std::isfinite(h))
            throw std::runtime_error("histogram csv: invalid bin value at gray " + std::to_string(gray));
        hist.bins[gray] = h;
        ++rows;
    }
    if (rows != kGrayLevels)
        throw std::runtime_error("histogram csv: expected 256 rows, got " + std::to_string(rows));
    double total = hist.sum();
    if (std::abs(total - 1.0) > 1e-6)
        throw std::runtime_error("histogram csv: bins sum to " + std::to_string(total));
    // Renormalize real drift, but keep bins verbatim when the sum is 1 to
    // within accumulation residue so our own output parses back losslessly.
    if (std::abs(total - 1.0) > 1e-12)
        for (double& b : hist.bins) b /= total;
    return hist;
}

}  // namespace lathresh
