#ifndef WGF_TRANSPORT_HPP
#define WGF_TRANSPORT_HPP

#include <vector>

#include "wgf/measure.hpp"

namespace wgf {

/// Monotone (optimal) coupling between two quantile measures on the same
/// grid: node i of mu is matched with node i of nu.
struct MonotonePlan {
    std::vector<std::pair<double, double>> pairs;
    double cost; // squared transport cost, equals w2^2
};

/// L2-Wasserstein distance by the trapezoidal level sum over matched
/// quantiles.  Requires equal grid sizes.
double w2(const QuantileMeasure& mu, const QuantileMeasure& nu);

/// The monotone coupling realizing w2.
MonotonePlan monotone_plan(const QuantileMeasure& mu, const QuantileMeasure& nu);

/// Margin of the binomial triangle bound
/// 2 w2^2(eta,nu) + 2 w2^2(nu,rho) - w2^2(eta,rho); non-negative.
double check_triangle_binomial(const QuantileMeasure& eta,
                               const QuantileMeasure& nu,
                               const QuantileMeasure& rho);

/// Margins of the two-sided moment-distance bound
/// M2(rho) - 2 M2(nu) <= 2 w2^2(rho,nu) <= 3 M2(rho) + 6 M2(nu);
/// first = lower-bound slack, second = upper-bound slack, both non-negative.
std::pair<double, double> check_moment_distance_bound(const QuantileMeasure& rho,
                                                      const QuantileMeasure& nu);

} // namespace wgf

#endif
