#pragma once

// Counter-based random number generation (Philox 4x32-10) with cheap,
// collision-resistant substream derivation.
//
// Every randomized procedure in this library names its random stream
// explicitly: a stream identity is derived from a master seed plus a list of
// integer tags (replicate index, grid cell, purpose code, ...), and equal
// inputs always produce the same stream. Because streams are keyed rather
// than split sequentially, work can be executed in any order, or on any
// number of workers, without changing a single draw.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hypercirc {

namespace detail {

// Fixed 64-bit finalizer used as the mixing element of the derivation sponge
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace detail

// 128 bits of stream identity: a Philox key plus the high half of the
// 128-bit counter. The low counter half is the within-stream block index.
struct StreamId {
    std::uint64_t key = 0;
    std::uint64_t stream = 0;
};

// Derives a stream identity from a master seed and a tag list by absorbing
// the tags into two independently evolving 64-bit lanes.
inline StreamId substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t a = detail::splitmix64(seed);
    std::uint64_t b = detail::splitmix64(seed ^ 0x517cc1b727220a95ull);
    for (const std::uint64_t t : tags) {
        a = detail::splitmix64(a ^ t);
        b = detail::splitmix64(b + (t ^ 0x2545f4914f6cdd1dull));
    }
    return {a, b};
}

// Scalar convenience for call sites that only need a derived 64-bit seed
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return substream(seed, tags).key;
}

// Philox 4x32 with 10 rounds. Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(StreamId id)
        : key_{static_cast<std::uint32_t>(id.key), static_cast<std::uint32_t>(id.key >> 32)},
          ctr_{0u, 0u,
               static_cast<std::uint32_t>(id.stream),
               static_cast<std::uint32_t>(id.stream >> 32)} {}

    RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
        : RngStream(substream(seed, tags)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64() {
        if (pos_ >= 4) refill();
        const std::uint64_t lo = buf_[pos_];
        const std::uint64_t hi = buf_[pos_ + 1];
        pos_ += 2;
        return lo | (hi << 32);
    }

    // Uniform double in [0, 1), 53 random bits
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) {
        return a + (b - a) * uniform();
    }

    // Unbiased integer in [0, n) via rejection of the short remainder range
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("RngStream::bounded: n must be positive");
        const std::uint64_t rem = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= rem) return r % n;
        }
    }

private:
    void refill() {
        std::array<std::uint32_t, 4> x = ctr_;
        std::uint32_t k0 = key_[0];
        std::uint32_t k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * x[0];
            const std::uint64_t p1 = 0xCD9E8D57ull * x[2];
            x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k0,
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k1,
                 static_cast<std::uint32_t>(p0)};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = x;
        // 64-bit block counter in the low lanes, the stream id stays put
        if (++ctr_[0] == 0) ++ctr_[1];
        pos_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

// In-place Fisher-Yates shuffle driven by an explicit stream
template <class T>
void shuffle(std::vector<T>& values, RngStream& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(values[i - 1], values[j]);
    }
}

} // namespace hypercirc
