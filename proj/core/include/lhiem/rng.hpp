#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace lhiem::rng {

// 64-bit finalizer from splitmix64. Good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stable 64-bit string hash (FNV-1a). std::hash is implementation defined,
// so ids are hashed with this to keep streams reproducible everywhere.
constexpr std::uint64_t hash_id(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Derives one stream key from a list of domain keys (seed, year, submodel
// tag, person/family hash). Order sensitive by construction.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (auto k : keys) {
        h = mix64(h ^ k) + 0x9E3779B97F4A7C15ULL;
    }
    return h;
}

// Inverse standard normal CDF, Acklam's rational approximation with one
// Halley refinement step. Relative error below 1e-13 on (0,1).
double inv_normal_cdf(double p);

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730951); }

// Counter-based stream: the state advances by a fixed odd increment and each
// output is the splitmix64 finalizer of the state. Streams with distinct
// keys are independent for simulation purposes, and a stream's draw sequence
// depends only on its key, never on other streams. That makes every result
// independent of iteration order and thread schedule.
class Stream {
  public:
    explicit Stream(std::uint64_t key) : state_(key) {}

    Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
        : state_(derive_key({seed})) {
        for (auto k : keys) state_ = derive_key({state_, k});
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Box-Muller; the sine branch is discarded so one draw consumes exactly
    // two uniforms regardless of history.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double lognormal(double log_mean, double log_sd) {
        return std::exp(normal(log_mean, log_sd));
    }

    // Lognormal conditioned on [lo, hi] via inverse-CDF sampling.
    double truncated_lognormal(double log_mean, double log_sd, double lo, double hi);

    // Poisson draw; inversion for small rates, Hormann's PTRS transformed
    // rejection for large ones. Deterministic given the stream.
    std::uint64_t poisson(double lambda);

    // Weighted pick: index i with probability weights[i] / sum(weights).
    std::size_t pick_weighted(const double* weights, std::size_t n);

  private:
    std::uint64_t state_;
};

} // namespace lhiem::rng
