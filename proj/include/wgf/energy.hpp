#ifndef WGF_ENERGY_HPP
#define WGF_ENERGY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wgf/measure.hpp"

namespace wgf {

/// Smooth potential with its derivative and the constant d1 bounding
/// |value| and |deriv| by d1 (1 + x^2) on the working window.
struct PotentialHandle {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double growth_constant = 0.0;
    bool symmetric = false;
};

/// Free energy F = U_m + V + W.  Absent m means no internal-energy term
/// (pure transport); otherwise m >= 1 with m = 1 the log case.
struct EnergySpec {
    std::optional<double> m;
    std::optional<PotentialHandle> external;
    std::optional<PotentialHandle> interaction;

    bool has_internal() const { return m.has_value(); }
    /// Largest growth constant among the potentials present (0 if none).
    double growth_bound() const;
    /// Checks m >= 1 and that an interaction carries the symmetric flag.
    void validate() const;
};

/// Internal energy of the piecewise reconstruction: entropy for m = 1,
/// power law for m > 1.  Infinite (error) on measures with atoms.
double internal(const QuantileMeasure& mu, double m);

/// Potential energy by the trapezoidal level sum of V at the positions.
double external(const QuantileMeasure& mu, const PotentialHandle& v);

/// Interaction energy 1/2 sum_ij w_i w_j W(X_i - X_j).
double interaction(const QuantileMeasure& mu, const PotentialHandle& w);

/// Sum of the energy terms an EnergySpec switches on.
double total(const QuantileMeasure& mu, const EnergySpec& spec);

/// Exact gradient of total() with respect to the positions.
std::vector<double> gradient_total(const QuantileMeasure& mu, const EnergySpec& spec);

/// internal(mu, m) + d2 (1 + M2(mu)); non-negative when d2 dominates the
/// negative part of the entropy.
double carleman_floor(const QuantileMeasure& mu, double m, double d2);

/// Largest violation of |f| <= c (1 + x^2) for value and derivative over an
/// evenly sampled window; <= 0 means the bound holds.
double audit_growth(const PotentialHandle& p, double lo, double hi,
                    std::size_t samples = 1000);

/// Largest |W(x) - W(-x)| over the sampled window.
double audit_symmetry(const PotentialHandle& p, double lo, double hi,
                      std::size_t samples = 1000);

/// Catalog potentials: "zero", "quadratic" (x^2/2), "double_well"
/// ((x^2-1)^2/4, growth constant valid on the audited window only),
/// "gaussian_kernel" (exp(-x^2/2)).  scale multiplies the shape.
PotentialHandle catalog_potential(const std::string& name, double scale = 1.0,
                                  double audit_halfwidth = 3.0);

} // namespace wgf

#endif
