#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace imbalforest {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Stateful drawing engine: xoshiro256++ seeded from a 64-bit key by a
// SplitMix64 expansion. The algorithm is fixed so that sequences are
// reproducible across builds and platforms; all distribution transforms
// (uniform real, bounded int, gaussian) are implemented here rather than
// delegated to <random>, whose distributions are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) {
        std::uint64_t x = key;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            word = detail::mix64(x);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased (Lemire rejection).
    std::uint64_t next_below(std::uint64_t n) {
        assert(n > 0);
        unsigned __int128 m = (unsigned __int128)next_u64() * n;
        auto low = (std::uint64_t)m;
        if (low < n) {
            const std::uint64_t cutoff = (0 - n) % n;
            while (low < cutoff) {
                m = (unsigned __int128)next_u64() * n;
                low = (std::uint64_t)m;
            }
        }
        return (std::uint64_t)(m >> 64);
    }

    // Standard normal via Box-Muller (cosine branch, no caching).
    double next_gaussian() {
        const double u1 = 1.0 - next_double(); // (0, 1]
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Fisher-Yates, descending.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = next_below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_[4];
};

// Immutable key for a labeled pseudorandom stream. Child derivation chains
// one 64-bit key per label component, so a stream is a pure function of
// (seed, component sequence); stream() instantiates a fresh engine at the
// start of the sequence every time.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::string label = "")
        : seed_(seed), label_(std::move(label)) {
        key_ = detail::mix64(seed_ + 0x9E3779B97F4A7C15ULL);
        if (!label_.empty()) key_ = chain(key_, label_);
    }

    RandomSource child(std::string_view name) const {
        RandomSource c(*this);
        c.label_ = label_.empty() ? std::string(name)
                                  : label_ + "/" + std::string(name);
        c.key_ = chain(key_, name);
        return c;
    }

    RandomSource child(std::string_view name, std::uint64_t index) const {
        return child(std::string(name) + "/" + std::to_string(index));
    }

    RandomStream stream() const { return RandomStream(key_); }

    std::uint64_t seed() const { return seed_; }
    const std::string& stream_label() const { return label_; }
    std::uint64_t key() const { return key_; }

private:
    static std::uint64_t chain(std::uint64_t key, std::string_view name) {
        return detail::mix64(key ^ (detail::fnv1a64(name) +
                                    0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t seed_;
    std::string label_;
    std::uint64_t key_;
};

} // namespace imbalforest
