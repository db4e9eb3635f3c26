#include "uavsim/rng.hpp"

#include <cmath>
#include <string>

namespace uavsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t Rng::index(std::uint64_t n) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return r % n;
}

int Rng::binomial(int trials, double p) {
    const double u = uniform();
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double ratio = p / (1.0 - p);
    double pmf = std::pow(1.0 - p, trials);
    double cdf = pmf;
    int k = 0;
    while (u >= cdf && k < trials) {
        pmf *= ratio * static_cast<double>(trials - k) / static_cast<double>(k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng rng_stream(std::uint64_t seed, std::string_view stream_label) {
    return Rng(splitmix64(splitmix64(seed) ^ fnv1a64(stream_label)));
}

Rng rng_stream(std::uint64_t seed, std::string_view stream_label, std::uint64_t index) {
    std::string label(stream_label);
    label += '/';
    label += std::to_string(index);
    return rng_stream(seed, label);
}

}  // namespace uavsim
