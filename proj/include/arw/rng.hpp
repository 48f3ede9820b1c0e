#pragma once

#include <cstdint>

namespace arw::rng {

// Purpose tags keep the deterministic streams of different subsystems in
// disjoint hash domains even when they share a seed and a geometry.
inline constexpr std::uint64_t kPurposeInstructions = 0x9e1afab0c602f3d1ULL;
inline constexpr std::uint64_t kPurposeInitialState = 0x3c79ae3f14530d75ULL;
inline constexpr std::uint64_t kPurposePlacement    = 0x5b1dd4e1a3a4f529ULL;
inline constexpr std::uint64_t kPurposeScheduler    = 0x86d5c4a8c2b07b1bULL;
inline constexpr std::uint64_t kPurposeGillespie    = 0xd0630c2f8a1e49adULL;
inline constexpr std::uint64_t kPurposeBootstrap    = 0x27e9f0663a7c5e87ULL;
inline constexpr std::uint64_t kPurposeReplica      = 0x713c3e9b0b25d6e3ULL;

struct Block {
    std::uint64_t x0;
    std::uint64_t x1;
};

/// Threefry-2x64, 20 rounds.  Counter-based: the output is a pure function
/// of (counter, key), so any instruction or variate can be regenerated by
/// index without touching shared state.
Block threefry2x64(std::uint64_t c0, std::uint64_t c1,
                   std::uint64_t k0, std::uint64_t k1);

/// SplitMix64 finalizer; used to derive keys and sub-seeds.
constexpr std::uint64_t mix64(std::uint64_t v) {
    v ^= v >> 30;
    v *= 0xbf58476d1ce4e5b9ULL;
    v ^= v >> 27;
    v *= 0x94d049bb133111ebULL;
    v ^= v >> 31;
    return v;
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix64(a + 0x9e3779b97f4a7c15ULL * (b + 1));
}

/// 53-bit mantissa uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Unbiased-enough mapping of a 64-bit word onto {0, ..., n-1}.
constexpr std::uint64_t below(std::uint64_t bits, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits) * n) >> 64);
}

/// Sequential convenience stream over the counter-based generator.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t stream = 0)
        : k0_(seed), k1_(combine(purpose, stream)) {}

    std::uint64_t next_u64() {
        Block b = threefry2x64(counter_++, 0, k0_, k1_);
        return b.x0;
    }
    double next_unit() { return to_unit(next_u64()); }
    std::uint64_t next_below(std::uint64_t n) { return below(next_u64(), n); }

private:
    std::uint64_t k0_;
    std::uint64_t k1_;
    std::uint64_t counter_ = 0;
};

}  // namespace arw::rng
