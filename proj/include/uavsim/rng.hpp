#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavsim {

/// Seeded random stream. Wraps mt19937_64 (whose raw output sequence is fixed
/// by the standard) and derives every variate with local code, so streams are
/// bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t stream_seed) : engine_(stream_seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t index(std::uint64_t n);

    /// Binomial(trials, p) by CDF inversion of a single uniform, so every call
    /// consumes exactly one draw and the result is non-decreasing in `trials`
    /// and `p` for a fixed draw. Trials here are small (a few hundred at most).
    int binomial(int trials, double p);

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Independent reproducible stream for (seed, label). Distinct labels yield
/// unrelated sequences, so adding draws to one model never shifts another.
Rng rng_stream(std::uint64_t seed, std::string_view stream_label);

/// Substream `index` of a labelled stream: rng_stream(seed, "<label>/<index>").
/// Keying draws by entity or packet lets runs that differ only in scheme or
/// population share their random numbers.
Rng rng_stream(std::uint64_t seed, std::string_view stream_label, std::uint64_t index);

}  // namespace uavsim
