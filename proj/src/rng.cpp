#include "aclab/rng.hpp"

#include <stdexcept>

namespace aclab {

std::size_t Rng::bounded(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::bounded: n must be > 0");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t value;
    do {
        value = next_u64();
    } while (value >= limit);
    return static_cast<std::size_t>(value % bound);
}

std::uint64_t stable_hash(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull; // FNV offset basis
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull; // FNV prime
    }
    return hash;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double keyed_unit(std::uint64_t seed, std::string_view key) {
    std::uint64_t mixed = mix64(seed ^ stable_hash(key));
    return static_cast<double>(mixed >> 11) * 0x1.0p-53;
}

} // namespace aclab
