#pragma once

#include <cmath>
#include <cstdint>

#include "qir/bits.hpp"

namespace qir {

// Counter-based generator: output i of stream s under seed k is a pure
// function of (k, s, i), so independent substreams stay reproducible no
// matter how work is scheduled.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed + 0x9e3779b97f4a7c15ull)), stream_(mix(stream ^ 0xd1b54a32d192ed03ull)) {}

    std::uint64_t next() {
        std::uint64_t z = mix(key_ + ctr_++);
        return mix(z ^ stream_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return next() < static_cast<std::uint64_t>(std::ldexp(p, 64));
    }

    std::uint8_t bit() { return static_cast<std::uint8_t>(next() >> 63); }

    BitVec random_bits(std::size_t count) {
        BitVec v(count);
        std::size_t i = 0;
        while (i < count) {
            std::uint64_t w = next();
            for (int b = 63; b >= 0 && i < count; --b) v[i++] = static_cast<std::uint8_t>((w >> b) & 1u);
        }
        return v;
    }

    BitVec bernoulli_bits(std::size_t count, double p) {
        BitVec v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = bernoulli(p) ? 1 : 0;
        return v;
    }

private:
    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
};

}  // namespace qir
