#ifndef WGF_DIAGNOSTICS_HPP
#define WGF_DIAGNOSTICS_HPP

#include <functional>
#include <string>
#include <vector>

#include "wgf/stepper.hpp"

namespace wgf {

/// One verified inequality or reported quantity.  margin >= 0 means the
/// check is satisfied; report-only entries carry asserted = false and store
/// their value in margin.
struct CheckEntry {
    std::string name;
    double margin = 0.0;
    double tolerance = 0.0;
    double location = 0.0; // step index or time
    bool asserted = true;
    bool passed = true;
};

struct DiagnosticsReport {
    std::vector<CheckEntry> entries;
    bool all_passed() const;
    void add(CheckEntry e);
};

/// Compactly supported smooth vector field with its analytic derivative.
struct TestVectorField {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    double support_lo = 0.0;
    double support_hi = 0.0;
};

/// Separable space-time test function with the derivatives the weak form
/// needs; vanishes for t outside [-t_hi, t_hi] and x outside [x_lo, x_hi].
struct SpaceTimeTestFunction {
    std::string name;
    std::function<double(double, double)> value; // (t, x)
    std::function<double(double, double)> dt;
    std::function<double(double, double)> dx;
    std::function<double(double, double)> dxx;
    double t_hi = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

/// Smooth even bump on (-1, 1), identically zero outside; with derivatives.
double bump(double y);
double bump_deriv(double y);
double bump_deriv2(double y);

/// Five fixed test fields spanning [lo, hi].
std::vector<TestVectorField> bump_fields(double lo, double hi);

/// Largest |value| of the field sampled outside its support box.
double audit_field_support(const TestVectorField& xi, double lo, double hi,
                           std::size_t samples = 1000);

/// Three fixed space-time bundles supported in (-t_hi, t_hi) x [lo, hi].
std::vector<SpaceTimeTestFunction> bump_bundles(double t_hi, double lo,
                                                double hi);

/// Slack in the per-step energy decay estimate at step k: positive means the
/// step dissipated at least as much as the two-step bound demands.
double energy_dissipation_margin(const Trajectory& traj, int k);

/// Kinetic sum, largest |internal energy| and largest second moment over the
/// states with time <= T; report-only entries.
DiagnosticsReport classical_bounds_report(const Trajectory& traj,
                                          const EnergySpec& spec, double T);

/// Absolute value of the stationarity functional of the two-step minimization
/// tested against xi: transport and potential terms by level sums, the
/// internal-energy term by midpoint quadrature per cell of the reconstructed
/// density.
double el_residual(const QuantileMeasure& rho, const QuantileMeasure& nu,
                   const QuantileMeasure& eta, double tau,
                   const EnergySpec& spec, const TestVectorField& xi);

/// Part of the residual attributable to incomplete optimization:
/// sum_i |xi(X_i)| |dPsi/dX_i|.
double el_optimizer_component(const QuantileMeasure& rho,
                              const QuantileMeasure& nu,
                              const QuantileMeasure& eta, double tau,
                              const EnergySpec& spec,
                              const TestVectorField& xi);

/// L1 norm plus total variation of the m-th power of the reconstructed
/// density, extended by zero outside the support.
double bv_norm(const QuantileMeasure& mu, double m);

/// C (1 + w2(rho^k,rho^{k-1})/tau + w2(rho^k,rho^{k-2})/tau) minus the BV
/// norm of (rho^k)^m; the earliest available state stands in for rho^{k-2}
/// on one-step trajectories.
double bv_step_bound_margin(const Trajectory& traj, int k, double m, double C);

/// Smallest C making every step's bv_step_bound_margin non-negative.
double min_bv_constant(const Trajectory& traj, double m);

/// |LHS - RHS| of the distributional identity tested against psi on the
/// piecewise-constant-in-time interpolant up to time T.
double weak_form_residual(const Trajectory& traj, const EnergySpec& spec,
                          const SpaceTimeTestFunction& psi, double T);

} // namespace wgf

#endif
