#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mitplan {

// Deterministic random source used throughout the simulator.
//
// std::mt19937_64 has a standard-specified output sequence, but the standard
// distribution adaptors do not, so every transform (uniform double, normal,
// categorical, shuffle) is written out here explicitly. Draw sequences are
// therefore identical across standard-library implementations, which the
// snapshot/restore and paired-evaluation machinery relies on.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0,1): top 53 bits of the engine output scaled by 2^-53.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0,n) by rejection on the engine output.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Marsaglia's polar method; the second variate of
    // each pair is cached and returned by the next call.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Inverse-CDF draw over (possibly unnormalized) non-negative weights.
    // Returns the smallest index whose cumulative weight exceeds u * total.
    std::size_t categorical(std::span<const double> weights);

    // Fisher-Yates using below(); element order is the only source of state.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Full textual state including the polar-method cache, suitable for
    // embedding in environment snapshots.
    std::string save_state() const;
    void load_state(const std::string& s);

    bool operator==(const Rng& other) const {
        return engine_ == other.engine_ && has_cached_ == other.has_cached_ &&
               (!has_cached_ || cached_bits() == other.cached_bits());
    }

private:
    std::uint64_t cached_bits() const;

    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace mitplan
