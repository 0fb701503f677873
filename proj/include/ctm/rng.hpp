#pragma once

// Deterministic randomness. Everything that flips coins in this library goes
// through Rng so that a (config, seed) pair replays bit-identically on any
// platform. std::uniform_real_distribution is implementation-defined, so the
// [0,1) mapping is done by hand from raw mt19937_64 output.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace ctm {

// splitmix64 step; used to mix (seed, index) pairs into substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be > 0. Uses the same 53-bit path as
    // uniform01 so the draw count per decision is always exactly one.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        auto idx = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
        return idx >= n ? n - 1 : idx;
    }

    // Independent substream for (this seed, index): trial streams, per-entity
    // streams, etc. Derivation is pure mixing, so derive(i) is stable no
    // matter how much the parent stream has advanced.
    Rng derive(std::uint64_t index) const { return Rng(derive_seed(index)); }

    std::uint64_t derive_seed(std::uint64_t index) const {
        return splitmix64(seed_ ^ splitmix64(index + 0x51ed2701ULL));
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

enum class Choice { First, Second };

// The coin-flip neuron: First with probability a/(a+b); a fair coin when both
// inputs are zero. Negative strengths are rejected. Consumes exactly one draw
// on every path.
inline Choice coin_flip(double a, double b, Rng& rng) {
    if (!(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("coin_flip: strengths must be non-negative");
    double u = rng.uniform01();
    double total = a + b;
    if (total <= 0.0) return u < 0.5 ? Choice::First : Choice::Second;
    return u * total < a ? Choice::First : Choice::Second;
}

// Resolves a categorical pick for an already-drawn u in [0,1); the Rng
// overload below draws exactly one u and defers here.
inline std::size_t categorical_pick(std::span<const double> strengths, double u) {
    if (strengths.empty()) throw std::invalid_argument("categorical_pick: empty");
    double total = 0.0;
    for (double s : strengths) {
        if (!(s >= 0.0)) throw std::invalid_argument("categorical_pick: negative strength");
        total += s;
    }
    if (total <= 0.0) {
        auto idx = static_cast<std::size_t>(u * static_cast<double>(strengths.size()));
        return idx >= strengths.size() ? strengths.size() - 1 : idx;
    }
    double x = u * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < strengths.size(); ++i) {
        cum += strengths[i];
        if (x < cum) return i;
    }
    // Only reachable through accumulated rounding; the last positive entry wins.
    for (std::size_t i = strengths.size(); i-- > 0;)
        if (strengths[i] > 0.0) return i;
    return strengths.size() - 1;
}

// k-ary generalization of coin_flip: one categorical draw over non-negative
// strengths, uniform when they sum to zero. A zero-strength entry can never
// win unless all entries are zero. Consumes exactly one draw.
inline std::size_t categorical_pick(std::span<const double> strengths, Rng& rng) {
    return categorical_pick(strengths, rng.uniform01());
}

// Writes the first out.size() values of Rng(seed).uniform01() — bit-identical
// to drawing them in sequence. For short prefixes only the slice of the
// mt19937_64 state that actually feeds them is seeded and twisted, which is
// what makes many-trial Monte Carlo runs affordable: constructing the full
// engine per trial costs more than the whole competition it drives.
inline void first_uniform01_draws(std::uint64_t seed, std::span<double> out) {
    constexpr std::size_t n = 312, m = 156;
    const std::size_t count = out.size();
    if (count == 0) return;
    if (count > n - m) { // draws past the first block mix twisted state; run the engine
        Rng rng(seed);
        for (std::size_t i = 0; i < count; ++i) out[i] = rng.uniform01();
        return;
    }
    // Seeding recurrence and one partial twist, per the standard's
    // mersenne_twister_engine definition. Draw k reads seeded words k, k+1,
    // and k+m, all still untwisted while k < n - m.
    std::uint64_t x[n];
    x[0] = seed;
    const std::size_t need = count + m;
    for (std::size_t i = 1; i < need; ++i)
        x[i] = 6364136223846793005ULL * (x[i - 1] ^ (x[i - 1] >> 62)) + i;
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t y = (x[k] & 0xFFFFFFFF80000000ULL) | (x[k + 1] & 0x7FFFFFFFULL);
        std::uint64_t v = x[k + m] ^ (y >> 1) ^ ((y & 1) ? 0xB5026F5AA96619E9ULL : 0ULL);
        v ^= (v >> 29) & 0x5555555555555555ULL;
        v ^= (v << 17) & 0x71D67FFFEDA60000ULL;
        v ^= (v << 37) & 0xFFF7EEE000000000ULL;
        v ^= v >> 43;
        out[k] = static_cast<double>(v >> 11) * 0x1.0p-53;
    }
}

} // namespace ctm
