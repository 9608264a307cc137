#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace navsim {

// Deterministic RNG. std::mt19937_64 output is pinned by the standard, but
// the std distributions are not, so uniform draws are derived from raw
// engine words to keep generated files identical across toolchains.
class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n)
    size_t uniform_index(size_t n) { return n == 0 ? 0 : static_cast<size_t>(engine_() % n); }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[uniform_index(items.size())];
    }

    bool chance(double p) { return uniform() < p; }

  private:
    std::mt19937_64 engine_;
};

// FNV-1a, used to derive per-episode and per-call seeds from strings.
inline uint64_t fnv1a(std::string_view text, uint64_t seed = 1469598103934665603ull) {
    uint64_t h = seed;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// splitmix64 finalizer; decorrelates nearby seed values.
inline uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace navsim
