#ifndef ARW_RNG_HPP
#define ARW_RNG_HPP

#include <cmath>
#include <cstdint>

namespace arw {

/// The splitmix64 finalizer (Steele/Lea/Flood mixing constants).
inline std::uint64_t splitmix64_scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Per-sample seed derivation: seed_i = scramble(master + (i+1) * gamma)
/// with the golden-gamma increment. Stateless, so sample i's stream is
/// independent of how work is distributed across threads.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_scramble(master + (index + 1) * 0x9e3779b97f4a7c15ull);
}

/// xoshiro256++ (Blackman & Vigna), seeded through splitmix64.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t st = seed;
        for (auto& word : state_) {
            st += 0x9e3779b97f4a7c15ull;
            word = splitmix64_scramble(st);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in (0, 1]: never zero, safe under log().
    double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    static const char* name() { return "xoshiro256++/box-muller"; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

struct GaussPair {
    double z0, z1;
};

/// Box-Muller transform; used instead of std::normal_distribution so the
/// stream is identical across standard libraries.
inline GaussPair gaussian_pair(Xoshiro256pp& rng) {
    const double u1 = rng.uniform_pos();
    const double u2 = rng.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.141592653589793238462643383279502884 * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace arw

#endif  // ARW_RNG_HPP
