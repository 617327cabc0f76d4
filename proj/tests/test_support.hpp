#ifndef WGF_TEST_SUPPORT_HPP
#define WGF_TEST_SUPPORT_HPP

#include <cstdint>
#include <vector>

#include "wgf/measure.hpp"

namespace testsup {

/// Deterministic splitmix64 stream; every test pins its own seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Strictly increasing positions with gaps bounded away from zero, centered
/// near the origin with span O(1).
inline std::vector<double> random_positions(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    double cur = rng.uniform(-2.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cur += 0.01 / double(n) + rng.uniform() * 3.0 / double(n);
        x[i] = cur;
    }
    return x;
}

inline wgf::QuantileMeasure random_measure(Rng& rng, std::size_t n) {
    return wgf::from_quantiles(random_positions(rng, n), wgf::Domain::line());
}

/// Central-difference step for perturbing node i, scaled to the adjacent gaps
/// so the truncation error of the stiff internal-energy terms stays scale
/// free; always small enough to preserve monotonicity.
inline double fd_step(const std::vector<double>& pos, std::size_t i) {
    double local = 1.0;
    if (i > 0) local = std::min(local, pos[i] - pos[i - 1]);
    if (i + 1 < pos.size()) local = std::min(local, pos[i + 1] - pos[i]);
    return 6e-6 * std::max(local, 1e-6);
}

} // namespace testsup

#endif
