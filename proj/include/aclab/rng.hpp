#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace aclab {

// Deterministic random source. std::mt19937_64 output is specified
// bit-exactly by the standard; the derived draws below avoid
// std::uniform_int_distribution and friends, whose mappings vary across
// standard library implementations. Same seed, same stream, everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_unit() < p; }

    // Uniform integer in [0, n). n must be > 0. Rejection sampling keeps
    // the mapping unbiased and portable.
    std::size_t bounded(std::size_t n);

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[bounded(i)]);
        }
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[bounded(items.size())];
    }

private:
    std::mt19937_64 engine_;
};

// Stable 64-bit string hash (FNV-1a). Used where a per-key deterministic
// value is needed independently of std::hash.
std::uint64_t stable_hash(std::string_view text);

// splitmix64 finalizer; mixes a counter or combined seed into a
// well-distributed 64-bit value.
std::uint64_t mix64(std::uint64_t x);

// Deterministic uniform [0,1) derived from (seed, key). Used by the noisy
// decider wrapper so each record's flip is independent of dataset order.
double keyed_unit(std::uint64_t seed, std::string_view key);

} // namespace aclab
