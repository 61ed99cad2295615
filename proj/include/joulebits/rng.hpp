#ifndef JOULEBITS_RNG_HPP
#define JOULEBITS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <vector>

namespace joulebits {

// Counter-based deterministic generator. Output t of stream (seed, index) is
// a pure function of (seed, index, t), so fuzz workers can be split by index
// and still reproduce bit-identically regardless of scheduling.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(mix(seed + GOLDEN) ^ mix(stream + FLEA))), counter_(0) {}

    // Independent child stream; child i of the same parent is stable.
    SplitRng split(std::uint64_t index) const { return SplitRng(key_, index + 1); }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * GOLDEN); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Dirichlet(1,...,1) sample of dimension n (uniform on the simplex).
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> v(n);
        double total = 0.0;
        for (auto& x : v) {
            x = -std::log(1.0 - uniform());
            total += x;
        }
        for (auto& x : v) x /= total;
        return v;
    }

private:
    static constexpr std::uint64_t GOLDEN = 0x9e3779b97f4a7c15ULL;
    static constexpr std::uint64_t FLEA = 0xbf58476d1ce4e5b9ULL;

    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace joulebits

#endif  // JOULEBITS_RNG_HPP
