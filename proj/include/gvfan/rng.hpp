#pragma once

#include <cstdint>

namespace gvfan {

// SplitMix64: deterministic, cheap, and splittable so independent consumers
// can be derived from one --seed without sharing a stream.
struct SplitRng {
    uint64_t state = 0x9e3779b97f4a7c15ull;

    explicit SplitRng(uint64_t seed = 0) { state = seed + 0x9e3779b97f4a7c15ull; }

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    SplitRng split(uint64_t tag) {
        uint64_t z = next();
        return SplitRng(z ^ (tag * 0xda942042e4dd58b5ull));
    }

    // uniform in [lo, hi], inclusive
    long long uniform(long long lo, long long hi) {
        uint64_t span = (uint64_t)(hi - lo) + 1;
        return lo + (long long)(next() % span);
    }

    double uniform01() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
};

}  // namespace gvfan
