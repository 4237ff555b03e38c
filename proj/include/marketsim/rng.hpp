#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace marketsim {

// splitmix64 finalizer: full-avalanche mix used to derive independent stream
// keys from (master seed, trial, side, person) tuples
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic generator. mt19937_64 is bit-exact per the standard; the
// transforms below are hand-rolled so that draws are identical on every
// platform (std distributions are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t key) : engine_(key) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, n), rejection sampled so every value is exactly equiprobable
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = ~0ULL - ~0ULL % n;
        for (;;) {
            std::uint64_t x = next_u64();
            if (x < limit) return x % n;
        }
    }

    // uniform in the open interval (0, 1), 53-bit resolution
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal(double sigma = 1.0);

    // standard Gumbel, -log(-log(u)); finite because uniform01 avoids 0 and 1
    double gumbel();

    // Fisher-Yates
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derivation scheme: master -> trial -> person. Hash-based (counter style)
// so trials can run on any worker in any order with identical draws.
struct Stream {
    std::uint64_t key;
    Stream child(std::uint64_t tag) const { return Stream{mix64(key ^ mix64(tag))}; }
    Rng rng() const { return Rng(key); }
};

inline Stream master_stream(std::uint64_t seed) { return Stream{mix64(seed)}; }

inline Stream trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return master_stream(seed).child(trial);
}

// side: 0 = men, 1 = women (kept as raw int to avoid a core dependency)
inline Stream person_stream(Stream trial, int side, std::int32_t index) {
    std::uint64_t tag = (static_cast<std::uint64_t>(side + 1) << 32) |
                        static_cast<std::uint64_t>(static_cast<std::uint32_t>(index));
    return trial.child(tag);
}

}  // namespace marketsim
