#ifndef WGF_STEPPER_HPP
#define WGF_STEPPER_HPP

#include <vector>

#include "wgf/energy.hpp"
#include "wgf/measure.hpp"
#include "wgf/transport.hpp"

namespace wgf {

enum class Scheme { jko, bdf2 };
enum class Initializer { duplicate, jko_substep };

struct StepperConfig {
    double tau = 1e-3;
    double grad_tol = 1e-9; // stop when sup|grad| <= grad_tol (1 + |objective|)
    int max_iters = 500;
    double min_gap = 1e-12; // structural floor on cell widths
    double d1 = 0.0;        // potential growth constant (catalog-supplied)
    double d2 = 1.0;        // entropy floor constant
    double d3 = 0.0;        // initialization proximity constant (reported)
    double d4 = 0.0;        // initialization energy constant (reported)
    bool override_tau_guard = false;
    bool check_lower_bound = false; // monitor coercivity floor at every iterate
};

/// One accepted minimizing-movement step.
struct StepResult {
    QuantileMeasure state;
    double objective = 0.0;
    double grad_sup = 0.0;
    int iterations = 0;
    double min_coercivity_margin = std::numeric_limits<double>::quiet_NaN();
};

/// Inner optimizer gave up before reaching the stationarity tolerance; the
/// best iterate found is attached.
class OptimizerDidNotConvergeError : public Error {
public:
    OptimizerDidNotConvergeError(const std::string& msg, StepResult best)
        : Error(msg), best_(std::move(best)) {}
    const StepResult& best() const { return best_; }

private:
    StepResult best_;
};

struct StepRecord {
    double time = 0.0;
    double w2_increment = 0.0;      // w2(rho^{k-1}, rho^k)
    double energy = 0.0;            // F(rho^k)
    double dissipation_margin = 0.0;
    int iterations = 0;
    double grad_sup = 0.0;
};

/// Discrete solution path.  For bdf2 the state list starts with the
/// pre-initial member rho^{-1}; step k produced states[k + offset].
struct Trajectory {
    Scheme scheme = Scheme::bdf2;
    Initializer initializer = Initializer::duplicate;
    double tau = 0.0;
    std::vector<QuantileMeasure> states;
    std::vector<double> times;    // per state
    std::vector<double> energies; // F per state (+inf on atoms)
    std::vector<StepRecord> records;
    int init_iterations = 0; // optimizer work of the jko substep, if any
    // smallest observed gap between the penalized energy and its coercivity
    // floor over all optimizer iterates (NaN when unmonitored)
    double min_coercivity_margin = std::numeric_limits<double>::quiet_NaN();

    /// Index of the last produced state in scheme numbering.
    int last_index() const { return int(states.size()) - 1 - offset(); }
    /// State by scheme index: bdf2 admits k = -1, jko starts at 0.
    const QuantileMeasure& state(int k) const;
    double time_of(int k) const;
    double energy_of(int k) const;
    int offset() const { return scheme == Scheme::bdf2 ? 1 : 0; }
};

/// Run ended early; carries the path up to the failure.
class RunAbortedError : public Error {
public:
    RunAbortedError(const std::string& msg, Trajectory partial)
        : Error(msg), partial_(std::move(partial)) {}
    const Trajectory& partial() const { return partial_; }

private:
    Trajectory partial_;
};

/// Movement-penalized energy
/// (1/tau) w2^2(nu, rho) - (1/4tau) w2^2(eta, rho) + F(rho).
double penalization(double tau, const QuantileMeasure& eta,
                    const QuantileMeasure& nu, const QuantileMeasure& rho,
                    const EnergySpec& spec);

/// Gradient of penalization with respect to the positions of rho.
std::vector<double> penalization_gradient(double tau, const QuantileMeasure& eta,
                                          const QuantileMeasure& nu,
                                          const QuantileMeasure& rho,
                                          const EnergySpec& spec);

/// Coercivity floor of the penalized energy:
/// (1/8tau - 3/2 d1 - d2) M2(rho) - (1/tau) M2(nu) - (3/4tau) M2(eta)
/// - d2 - 3/2 d1.
double lower_bound_floor(double tau, const QuantileMeasure& eta,
                         const QuantileMeasure& nu, const QuantileMeasure& rho,
                         double d1, double d2);

/// Largest admissible step 1 / (12 d1 + 8 d2); +infinity when both vanish.
double tau_threshold(double d1, double d2);

/// Minimizes (1/2tau) w2^2(nu, .) + F from the warm start nu.
StepResult jko_step(double tau, const QuantileMeasure& nu,
                    const EnergySpec& spec, const StepperConfig& cfg);

/// Minimizes the penalized energy from the monotonicity-projected
/// extrapolation (4 nu - eta)/3; falls back to a restart from nu whenever
/// that candidate would not improve on nu.
StepResult bdf2_step(double tau, const QuantileMeasure& eta,
                     const QuantileMeasure& nu, const EnergySpec& spec,
                     const StepperConfig& cfg);

/// Minimizes F alone (no movement penalty) from the given start.
StepResult minimize_energy(const QuantileMeasure& start, const EnergySpec& spec,
                           const StepperConfig& cfg);

/// Iterates ceil(T/tau) steps of the chosen scheme.  The jko_substep
/// initializer spends the first step on a single JKO substep so the starting
/// pair (rho0 at t=0, substep at t=tau) is second-order consistent.
Trajectory run(const QuantileMeasure& rho0, double T, Scheme scheme,
               const EnergySpec& spec, const StepperConfig& cfg,
               Initializer init = Initializer::duplicate);

/// Weighted least-squares projection onto non-decreasing vectors
/// (pool-adjacent-violators).
std::vector<double> isotonic_projection(std::vector<double> values,
                                        const std::vector<double>& weights);

} // namespace wgf

#endif
