#pragma once

#include <cstdint>

namespace forge {

// splitmix64: used for seeding and for hashing (seed, index) tuples into
// independent streams. One fixed-point pass is enough to decorrelate
// counter-like inputs.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
// Small state, fast, and good enough statistics for Monte-Carlo sampling.
class Rng {
  public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed = 0x853c49e6748fea9bULL) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x += 0x9e3779b97f4a7c15ULL);
    }

    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ULL; }

    uint64_t operator()() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1). 53-bit mantissa; identical on every platform.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n). Unbiased via rejection.
    uint64_t below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = (*this)();
            if (r >= threshold) return r % n;
        }
    }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

// Stream derived from a master seed and a tuple of indices; trial i of point
// (a,b,c) always sees the same stream no matter how work is scheduled.
inline Rng make_stream(uint64_t master, uint64_t a, uint64_t b = 0, uint64_t c = 0, uint64_t d = 0) {
    uint64_t h = splitmix64(master);
    h = hash_combine(h, a);
    h = hash_combine(h, b);
    h = hash_combine(h, c);
    h = hash_combine(h, d);
    return Rng(h);
}

}  // namespace forge
