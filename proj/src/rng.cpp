#include "arw/rng.hpp"

namespace arw::rng {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int r) {
    return (x << r) | (x >> (64 - r));
}

// Rotation schedule of Threefry-2x64.
constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;

}  // namespace

Block threefry2x64(std::uint64_t c0, std::uint64_t c1,
                   std::uint64_t k0, std::uint64_t k1) {
    const std::uint64_t ks[3] = {k0, k1, k0 ^ k1 ^ kParity};
    std::uint64_t x0 = c0 + ks[0];
    std::uint64_t x1 = c1 + ks[1];
    for (int round = 0; round < 20; ++round) {
        x0 += x1;
        x1 = rotl(x1, kRot[round % 8]);
        x1 ^= x0;
        if (round % 4 == 3) {
            const std::uint64_t s = static_cast<std::uint64_t>(round / 4 + 1);
            x0 += ks[s % 3];
            x1 += ks[(s + 1) % 3] + s;
        }
    }
    return Block{x0, x1};
}

}  // namespace arw::rng
