#pragma once

#include <cmath>
#include <cstdint>

namespace t2qc {

/// Counter-based Philox2x64-10 generator. Output is a pure function of
/// (key, counter), so independent substreams are made by deriving distinct
/// keys and every draw sequence is reproducible bit-for-bit regardless of
/// what other streams do.
class Philox2x64 {
  public:
    explicit Philox2x64(std::uint64_t key, std::uint64_t counter = 0)
        : key_(key), ctr_(counter) {}

    std::uint64_t next_u64() {
        if (have_ == 0) {
            block(ctr_++, buf_[0], buf_[1]);
            have_ = 2;
        }
        return buf_[2 - have_--];
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1]; safe as a log() argument.
    double uniform_oc() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via the Box-Muller transform (explicit algorithm so
    /// that a given seed yields the same stream on every platform).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform_oc();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    void block(std::uint64_t n, std::uint64_t& x0, std::uint64_t& x1) const {
        // counter block (n, 0), 10 rounds
        std::uint64_t c0 = n, c1 = 0, k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod =
                (unsigned __int128)0xD2B74407B1CE6E93ULL * c0;
            const std::uint64_t hi = std::uint64_t(prod >> 64);
            const std::uint64_t lo = std::uint64_t(prod);
            c0 = hi ^ k ^ c1;
            c1 = lo;
            k += 0x9E3779B97F4A7C15ULL;  // Weyl increment
        }
        x0 = c0;
        x1 = c1;
    }

    std::uint64_t key_;
    std::uint64_t ctr_;
    std::uint64_t buf_[2] = {0, 0};
    int have_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; full-avalanche 64-bit hash step.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive a substream key from a seed and up to three stream coordinates
/// (e.g. purpose tag, outer replicate, subset mask).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t k = mix64(seed);
    k = mix64(k ^ a);
    k = mix64(k ^ b);
    k = mix64(k ^ c);
    return k;
}

inline Philox2x64 make_stream(std::uint64_t seed, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    return Philox2x64(stream_key(seed, a, b, c));
}

/// Stream purpose tags; keeps draws for different pipeline stages disjoint.
namespace stream {
inline constexpr std::uint64_t ucl_phase1 = 0xA1;
inline constexpr std::uint64_t ucl_means = 0xA2;
inline constexpr std::uint64_t generator = 0xB1;
inline constexpr std::uint64_t test = 0xF0;
}  // namespace stream

}  // namespace t2qc
