#ifndef MFTS_RNG_HPP
#define MFTS_RNG_HPP

#include <cstdint>
#include <initializer_list>

namespace mfts {

// Deterministic keyed random stream (SplitMix64). The state advances by a
// fixed increment and each output is a bijective mix of the counter, so a
// stream is fully determined by its 64-bit key: replications seeded via
// derive_stream are order- and parallelism-independent.
//
// Draw mapping, fixed by contract:
//   next_u64      — one SplitMix64 step
//   next_uniform  — ((x >> 11) + 1) * 2^-53, in (0, 1]
//   next_normal   — Box-Muller, consumes exactly two uniforms u1, u2:
//                   sqrt(-2 ln u1) * cos(2*pi*u2)
// Bit-reproducible for a given libm (log/cos enter only via next_normal).
class Rng {
  public:
    explicit Rng(uint64_t key) : state_(key) {}

    uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_normal();

  private:
    uint64_t state_;
};

// Hashes (base_seed, index...) into a stream key. Distinct part lists give
// independent streams; the hash is stationary across runs and platforms.
uint64_t derive_stream(std::initializer_list<uint64_t> parts);

} // namespace mfts

#endif
