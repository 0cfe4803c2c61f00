#include "mfts/rng.hpp"

#include <cmath>

namespace mfts {

namespace {

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

double Rng::next_normal() {
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

uint64_t derive_stream(std::initializer_list<uint64_t> parts) {
    uint64_t key = 0x8E51'2CAF'38D1'04E5ULL;
    for (uint64_t p : parts) key = mix64(key ^ mix64(p + 0x9E3779B97F4A7C15ULL));
    return key;
}

} // namespace mfts
