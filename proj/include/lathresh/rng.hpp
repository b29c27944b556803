#ifndef LATHRESH_RNG_HPP
#define LATHRESH_RNG_HPP

#include <cstdint>
#include <random>

namespace lathresh {

// splitmix64 step; used to derive independent stream seeds from one run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t run_seed, std::uint64_t stream) {
    return splitmix64(run_seed ^ splitmix64(stream + 1));
}

// Uniform double in [0,1) with 53 random bits. Bit-reproducible across
// standard libraries, unlike std::uniform_real_distribution.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace lathresh

#endif
