#pragma once

#include <array>
#include <cstdint>

namespace gelation {

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw).
// The 64-bit seed is the cipher key; a stream index selects a disjoint
// 2^64-draw block by occupying the high counter words, which makes
// per-replica streams reproducible regardless of scheduling.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, 0,
               static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = 0xD2511F53ull * ctr[0];
            std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

    std::uint64_t next_u64() {
        if (idx_ == 2) {
            out_ = block(ctr_, key_);
            if (++ctr_[0] == 0) ++ctr_[1];
            idx_ = 0;
        }
        int i = 2 * idx_++;
        return static_cast<std::uint64_t>(out_[i]) |
               (static_cast<std::uint64_t>(out_[i + 1]) << 32);
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> out_{};
    int idx_ = 2;
};

// SplitMix64 (Steele, Lea, Vigna); used for hashing seeds into substream keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

} // namespace gelation
