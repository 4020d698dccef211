#pragma once

#include <cstdint>

namespace splitlab {

// Philox2x64-10 keyed counter generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). A draw is a pure function of
// (seed, stream, counter): no state, O(1) random access at any index,
// bit-identical across platforms and thread schedules.
namespace philox {

inline constexpr std::uint64_t kMultiplier = 0xD2B74407B1CE6E93ULL;
inline constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

struct Block {
    std::uint64_t w0;
    std::uint64_t w1;
};

inline Block block(std::uint64_t key, std::uint64_t c0, std::uint64_t c1) {
    std::uint64_t x0 = c0;
    std::uint64_t x1 = c1;
    std::uint64_t k = key;
    for (int round = 0; round < 10; ++round) {
        const unsigned __int128 prod = static_cast<unsigned __int128>(kMultiplier) * x0;
        const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
        const std::uint64_t lo = static_cast<std::uint64_t>(prod);
        x0 = hi ^ k ^ x1;
        x1 = lo;
        k += kWeyl;
    }
    return {x0, x1};
}

} // namespace philox

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return philox::block(seed, counter, stream).w0;
}

// Uniform double in [0,1) with 53 random bits.
inline double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>(rng_word(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// Streams are keyed by (replication_id, substream). Substream ids separate
// independent uses inside one replication (sampler, auxiliary draws, ...).
inline std::uint64_t make_stream(std::uint64_t replication_id, std::uint64_t substream = 0) {
    return replication_id * 0x100ULL + (substream & 0xFFULL);
}

} // namespace splitlab
