#ifndef WGF_REFERENCE_HPP
#define WGF_REFERENCE_HPP

#include <vector>

#include "wgf/measure.hpp"

namespace wgf {

enum class SolutionKind { gaussian_heat, ornstein_uhlenbeck, barenblatt_m2, ou_particle };

/// Closed-form solution evaluated at a fixed time.
struct Snapshot {
    SolutionKind kind = SolutionKind::gaussian_heat;
    double t = 0.0;
    double mean = 0.0;
    double var = 0.0;     // 0 for a point mass
    double c_mass = 0.0;  // barenblatt amplitude constant

    bool point_mass() const { return kind == SolutionKind::ou_particle; }
    bool bounded_support() const {
        return kind == SolutionKind::barenblatt_m2 || point_mass();
    }
    double density(double x) const;
    double cdf(double x) const;
    double quantile(double s) const;
    /// Interval carrying all but ~1e-16 of the mass.
    std::pair<double, double> support() const;
};

/// Heat flow of a Gaussian: variance grows by 2t.
Snapshot gaussian_heat(double t, double mean0, double var0);

/// Linear drift with unit diffusion: mean decays like e^-t, variance relaxes
/// to 1 at rate e^-2t.
Snapshot ornstein_uhlenbeck(double t, double mean0, double var0);

/// Self-similar compactly supported profile of the quadratic-diffusion flow,
/// unit mass; radius 3^(2/3) t^(1/3).
Snapshot barenblatt_m2(double t);

/// Single particle in the quadratic well, no diffusion: x(t) = x0 e^-t.
Snapshot ou_particle(double t, double x0);

/// W2 distance between two Gaussians (exact).
double w2_gaussians(double mean1, double var1, double mean2, double var2);

/// Quantile discretization of a snapshot.  Unbounded-support profiles pull
/// the endpoint levels inside by the tail rule 0.15/(n-1); bounded supports
/// map the exact edges to the endpoint nodes.
QuantileMeasure discretize(const Snapshot& snap, std::size_t n,
                           const Domain& dom = Domain::line());

/// L1 distance between the piecewise reconstruction of mu and the snapshot
/// density, including the exact mass outside the discrete support.
double l1_error(const QuantileMeasure& mu, const Snapshot& snap);

/// w2 between mu and the matched-size discretization of the snapshot.
double w2_error(const QuantileMeasure& mu, const Snapshot& snap);

/// Least-squares slope of log(error) against log(tau); taus strictly
/// decreasing, at least three positive pairs.
double empirical_order(const std::vector<double>& taus,
                       const std::vector<double>& errors);

/// Inverse CDF of the standard normal.
double normal_quantile(double p);

} // namespace wgf

#endif
