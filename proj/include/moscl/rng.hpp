#ifndef MOSCL_RNG_HPP
#define MOSCL_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace moscl {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Folds a base seed with stream coordinates (purpose tag, epoch, sample id, ...)
/// into an independent stream seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(seed);
    for (const auto p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

// Purpose tags keep streams for different consumers apart.
namespace stream {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t plan = 2;
inline constexpr std::uint64_t perturb = 3;
inline constexpr std::uint64_t pairs = 4;
inline constexpr std::uint64_t data = 5;
}  // namespace stream

}  // namespace moscl

#endif  // MOSCL_RNG_HPP
