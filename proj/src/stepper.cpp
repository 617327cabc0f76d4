#include "wgf/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wgf/optim.hpp"

namespace wgf {

const QuantileMeasure& Trajectory::state(int k) const {
    int idx = k + offset();
    if (idx < 0 || idx >= int(states.size()))
        throw IndexOutOfRangeError("trajectory state index out of range");
    return states[std::size_t(idx)];
}

double Trajectory::time_of(int k) const {
    int idx = k + offset();
    if (idx < 0 || idx >= int(times.size()))
        throw IndexOutOfRangeError("trajectory state index out of range");
    return times[std::size_t(idx)];
}

double Trajectory::energy_of(int k) const {
    int idx = k + offset();
    if (idx < 0 || idx >= int(energies.size()))
        throw IndexOutOfRangeError("trajectory state index out of range");
    return energies[std::size_t(idx)];
}

namespace {

void require_positive_tau(double tau) {
    if (!std::isfinite(tau) || tau <= 0.0)
        throw NonpositiveTimeError("time step must be positive and finite");
}

void require_compatible(const QuantileMeasure& a, const QuantileMeasure& b) {
    if (a.size() != b.size())
        throw GridMismatchError("measures live on different grid sizes");
    const Domain &da = a.domain(), &db = b.domain();
    if (da.bounded != db.bounded || da.lo != db.lo || da.hi != db.hi)
        throw GridMismatchError("measures live on different domains");
}

// squared movement term: sum_i w_i (x_i - y_i)^2, scaled
struct MetricTerm {
    const std::vector<double>* y;
    double coef;
};

// Objective in the node positions themselves.  An iterate whose gaps dip
// below the structural floor is reported as +infinity, so the line search
// backtracks into the feasible cone; the internal energy blows up there
// anyway, which keeps minimizers strictly inside for m >= 1.
struct StepObjective {
    const Domain* dom;
    const EnergySpec* spec;
    double min_gap;
    double delta;
    std::vector<double> w; // trapezoidal level weights
    std::vector<MetricTerm> metric;

    // coercivity monitor: floor(rho) = floor_m2 * M2(rho) + floor_const
    bool monitor = false;
    double floor_m2 = 0.0, floor_const = 0.0;
    mutable double min_margin = std::numeric_limits<double>::infinity();

    std::size_t size() const { return w.size(); }

    // lifts any squeezed gap back to the admissible cone
    std::vector<double> feasible(std::vector<double> pos) const {
        double floor_gap = std::max(min_gap, 1e-12);
        for (std::size_t j = 1; j < pos.size(); ++j) {
            if (pos[j] < pos[j - 1] + floor_gap)
                pos[j] = pos[j - 1] + floor_gap;
            while (pos[j] - pos[j - 1] < min_gap) // addition round-off
                pos[j] = std::nextafter(
                    pos[j], std::numeric_limits<double>::infinity());
        }
        return pos;
    }

    double operator()(const std::vector<double>& x, std::vector<double>& gx) const {
        const std::size_t n = size();
        gx.assign(n, 0.0);
        for (std::size_t j = 0; j + 1 < n; ++j)
            if (!(x[j + 1] - x[j] >= min_gap))
                return std::numeric_limits<double>::infinity();
        double val = 0.0;

        if (spec->m) {
            const double m = *spec->m;
            if (m == 1.0) {
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    double gap = x[j + 1] - x[j];
                    val += delta * std::log(delta / gap);
                    double t = delta / gap;
                    gx[j] += t;
                    gx[j + 1] -= t;
                }
            } else {
                const double dm = std::pow(delta, m);
                for (std::size_t j = 0; j + 1 < n; ++j) {
                    double gap = x[j + 1] - x[j];
                    double p = dm * std::pow(gap, -m);
                    val += p * gap / (m - 1.0);
                    gx[j] += p;
                    gx[j + 1] -= p;
                }
            }
        }
        if (spec->external) {
            const auto& pot = *spec->external;
            for (std::size_t i = 0; i < n; ++i) {
                val += w[i] * pot.value(x[i]);
                gx[i] += w[i] * pot.deriv(x[i]);
            }
        }
        if (spec->interaction) {
            const auto& ker = *spec->interaction;
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0, ag = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    double dx = x[i] - x[j];
                    av += w[j] * ker.value(dx);
                    ag += w[j] * ker.deriv(dx);
                }
                val += 0.5 * w[i] * av;
                gx[i] += w[i] * ag;
            }
        }
        for (const MetricTerm& t : metric) {
            const std::vector<double>& y = *t.y;
            for (std::size_t i = 0; i < n; ++i) {
                double dx = x[i] - y[i];
                val += t.coef * w[i] * dx * dx;
                gx[i] += 2.0 * t.coef * w[i] * dx;
            }
        }
        if (monitor && std::isfinite(val)) {
            double m2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) m2 += w[i] * x[i] * x[i];
            min_margin = std::min(min_margin, val - (floor_m2 * m2 + floor_const));
        }
        if (dom->bounded) {
            double k = 1.0 / std::max(min_gap, 1e-12);
            double under = std::max(dom->lo - x[0], 0.0);
            double over = std::max(x[n - 1] - dom->hi, 0.0);
            val += 0.5 * k * (under * under + over * over);
            gx[0] -= k * under;
            gx[n - 1] += k * over;
        }
        return val;
    }
};

StepObjective make_objective(const QuantileMeasure& shape, const EnergySpec& spec,
                             const StepperConfig& cfg) {
    StepObjective obj;
    obj.dom = &shape.domain();
    obj.spec = &spec;
    obj.min_gap = std::max(cfg.min_gap, 0.0);
    obj.delta = shape.delta();
    obj.w.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) obj.w[i] = shape.weight(i);
    return obj;
}

StepResult finish(const StepObjective& obj, const OptimResult& opt,
                  const Domain& dom, const StepperConfig& cfg) {
    std::vector<double> pos = opt.x;
    if (dom.bounded)
        for (double& p : pos) p = std::clamp(p, dom.lo, dom.hi);
    StepResult res{from_quantiles(std::move(pos), dom), opt.value, opt.grad_sup,
                   opt.iterations,
                   std::numeric_limits<double>::quiet_NaN()};
    if (obj.monitor) res.min_coercivity_margin = obj.min_margin;
    if (!opt.converged) {
        std::ostringstream msg;
        msg << "optimizer stopped after " << opt.iterations
            << " iterations with gradient sup-norm " << opt.grad_sup
            << " above tolerance " << cfg.grad_tol * (1.0 + std::abs(opt.value));
        throw OptimizerDidNotConvergeError(msg.str(), std::move(res));
    }
    return res;
}

} // namespace

double penalization(double tau, const QuantileMeasure& eta,
                    const QuantileMeasure& nu, const QuantileMeasure& rho,
                    const EnergySpec& spec) {
    require_positive_tau(tau);
    double dn = w2(nu, rho), de = w2(eta, rho);
    return (dn * dn) / tau - (de * de) / (4.0 * tau) + total(rho, spec);
}

std::vector<double> penalization_gradient(double tau, const QuantileMeasure& eta,
                                          const QuantileMeasure& nu,
                                          const QuantileMeasure& rho,
                                          const EnergySpec& spec) {
    require_positive_tau(tau);
    require_compatible(eta, rho);
    require_compatible(nu, rho);
    std::vector<double> g = gradient_total(rho, spec);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        double wi = rho.weight(i);
        g[i] += 2.0 * wi * (rho.position(i) - nu.position(i)) / tau;
        g[i] -= 0.5 * wi * (rho.position(i) - eta.position(i)) / tau;
    }
    return g;
}

double lower_bound_floor(double tau, const QuantileMeasure& eta,
                         const QuantileMeasure& nu, const QuantileMeasure& rho,
                         double d1, double d2) {
    require_positive_tau(tau);
    return (1.0 / (8.0 * tau) - 1.5 * d1 - d2) * second_moment(rho)
         - second_moment(nu) / tau - 0.75 * second_moment(eta) / tau
         - d2 - 1.5 * d1;
}

double tau_threshold(double d1, double d2) {
    if (!std::isfinite(d1) || !std::isfinite(d2))
        throw NonFiniteError("growth constants must be finite");
    if (d1 < 0.0 || d2 < 0.0)
        throw DegenerateInputError("growth constants must be non-negative");
    double denom = 12.0 * d1 + 8.0 * d2;
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / denom;
}

StepResult jko_step(double tau, const QuantileMeasure& nu,
                    const EnergySpec& spec, const StepperConfig& cfg) {
    require_positive_tau(tau);
    spec.validate();
    StepObjective obj = make_objective(nu, spec, cfg);
    obj.metric = {{&nu.positions(), 0.5 / tau}};
    OptimOptions opts{cfg.grad_tol, cfg.max_iters, 10,
                      [&obj](std::vector<double> p) {
                          return obj.feasible(std::move(p));
                      }};
    OptimResult opt =
        lbfgs_minimize(std::cref(obj), obj.feasible(nu.positions()), opts);
    return finish(obj, opt, nu.domain(), cfg);
}

StepResult bdf2_step(double tau, const QuantileMeasure& eta,
                     const QuantileMeasure& nu, const EnergySpec& spec,
                     const StepperConfig& cfg) {
    require_positive_tau(tau);
    require_compatible(eta, nu);
    spec.validate();
    const std::size_t n = nu.size();

    StepObjective obj = make_objective(nu, spec, cfg);
    obj.metric = {{&nu.positions(), 1.0 / tau}, {&eta.positions(), -0.25 / tau}};
    if (cfg.check_lower_bound) {
        obj.monitor = true;
        obj.floor_m2 = 1.0 / (8.0 * tau) - 1.5 * cfg.d1 - cfg.d2;
        obj.floor_const = -second_moment(nu) / tau
                        - 0.75 * second_moment(eta) / tau - cfg.d2 - 1.5 * cfg.d1;
    }

    std::vector<double> warm(n);
    for (std::size_t i = 0; i < n; ++i)
        warm[i] = (4.0 * nu.position(i) - eta.position(i)) / 3.0;
    bool monotone = true;
    for (std::size_t i = 1; i < n; ++i)
        if (warm[i] < warm[i - 1]) { monotone = false; break; }
    if (!monotone) warm = isotonic_projection(std::move(warm), obj.w);
    if (nu.domain().bounded)
        for (double& p : warm) p = std::clamp(p, nu.domain().lo, nu.domain().hi);

    OptimOptions opts{cfg.grad_tol, cfg.max_iters, 10,
                      [&obj](std::vector<double> p) {
                          return obj.feasible(std::move(p));
                      }};
    OptimResult opt =
        lbfgs_minimize(std::cref(obj), obj.feasible(std::move(warm)), opts);

    // The dissipation estimate needs the accepted point to beat the previous
    // state; restart from it if the extrapolated start found a worse basin.
    std::vector<double> gtmp;
    double at_nu = obj(obj.feasible(nu.positions()), gtmp);
    if (!(opt.value <= at_nu)) {
        OptimResult retry = lbfgs_minimize(std::cref(obj),
                                           obj.feasible(nu.positions()), opts);
        if (retry.value < opt.value) opt = std::move(retry);
    }
    return finish(obj, opt, nu.domain(), cfg);
}

StepResult minimize_energy(const QuantileMeasure& start, const EnergySpec& spec,
                           const StepperConfig& cfg) {
    spec.validate();
    StepObjective obj = make_objective(start, spec, cfg);
    OptimOptions opts{cfg.grad_tol, cfg.max_iters, 10,
                      [&obj](std::vector<double> p) {
                          return obj.feasible(std::move(p));
                      }};
    OptimResult opt = lbfgs_minimize(std::cref(obj),
                                     obj.feasible(start.positions()), opts);
    return finish(obj, opt, start.domain(), cfg);
}

Trajectory run(const QuantileMeasure& rho0, double T, Scheme scheme,
               const EnergySpec& spec, const StepperConfig& cfg,
               Initializer init) {
    if (!std::isfinite(T) || T <= 0.0)
        throw NonpositiveTimeError("final time must be positive and finite");
    require_positive_tau(cfg.tau);
    spec.validate();
    double tau_star = tau_threshold(cfg.d1, cfg.d2);
    if (!cfg.override_tau_guard && cfg.tau >= tau_star) {
        std::ostringstream msg;
        msg << "time step " << cfg.tau << " is not below the admissible threshold "
            << tau_star << " = 1/(12 d1 + 8 d2) with d1 = " << cfg.d1
            << ", d2 = " << cfg.d2;
        throw TauAboveThresholdError(msg.str());
    }

    const double tau = cfg.tau;
    const int total_steps = std::max(1, int(std::ceil(T / tau - 1e-9)));

    Trajectory traj;
    traj.scheme = scheme;
    traj.initializer = init;
    traj.tau = tau;

    auto energy_of = [&](const QuantileMeasure& mu) {
        try {
            return total(mu, spec);
        } catch (const SingularMeasureError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto push_state = [&](QuantileMeasure mu, double t) {
        traj.energies.push_back(energy_of(mu));
        traj.states.push_back(std::move(mu));
        traj.times.push_back(t);
    };

    int bdf2_steps = total_steps;
    if (scheme == Scheme::jko) {
        push_state(rho0, 0.0);
    } else if (init == Initializer::duplicate) {
        push_state(rho0, 0.0);
        push_state(rho0, 0.0);
    } else {
        push_state(rho0, 0.0);
        StepResult sub = jko_step(tau, rho0, spec, cfg);
        traj.init_iterations = sub.iterations;
        push_state(std::move(sub.state), tau);
        bdf2_steps = total_steps - 1;
    }

    const int steps = scheme == Scheme::jko ? total_steps : bdf2_steps;
    for (int k = 0; k < steps; ++k) {
        const std::size_t last = traj.states.size() - 1;
        StepResult step_res = [&] {
            try {
                if (scheme == Scheme::jko)
                    return jko_step(tau, traj.states[last], spec, cfg);
                return bdf2_step(tau, traj.states[last - 1], traj.states[last],
                                 spec, cfg);
            } catch (const OptimizerDidNotConvergeError& e) {
                throw RunAbortedError(std::string("step aborted: ") + e.what(),
                                      std::move(traj));
            }
        }();

        StepRecord rec;
        rec.time = traj.times[last] + tau;
        rec.w2_increment = w2(traj.states[last], step_res.state);
        rec.iterations = step_res.iterations;
        rec.grad_sup = step_res.grad_sup;
        if (cfg.check_lower_bound && scheme == Scheme::bdf2) {
            double m = step_res.min_coercivity_margin;
            if (std::isnan(traj.min_coercivity_margin) || m < traj.min_coercivity_margin)
                traj.min_coercivity_margin = m;
        }
        push_state(std::move(step_res.state), rec.time);

        const std::size_t cur = traj.states.size() - 1;
        rec.energy = traj.energies[cur];
        double relax = traj.energies[cur - 1]
                     - rec.w2_increment * rec.w2_increment / (2.0 * tau) - rec.energy;
        if (scheme == Scheme::bdf2) {
            double back = w2(traj.states[cur - 2], traj.states[cur - 1]);
            relax += back * back / (4.0 * tau);
        }
        rec.dissipation_margin = relax;
        traj.records.push_back(rec);
    }
    return traj;
}

std::vector<double> isotonic_projection(std::vector<double> values,
                                        const std::vector<double>& weights) {
    if (values.size() != weights.size())
        throw GridMismatchError("isotonic projection needs matching lengths");
    struct Block {
        double wsum, mean;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        Block b{weights[i], values[i], 1};
        while (!blocks.empty() && blocks.back().mean > b.mean) {
            const Block& p = blocks.back();
            double wsum = p.wsum + b.wsum;
            b = Block{wsum, (p.wsum * p.mean + b.wsum * b.mean) / wsum,
                      p.count + b.count};
            blocks.pop_back();
        }
        blocks.push_back(b);
    }
    std::size_t i = 0;
    for (const Block& b : blocks)
        for (std::size_t k = 0; k < b.count; ++k) values[i++] = b.mean;
    return values;
}

} // namespace wgf
