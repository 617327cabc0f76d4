#include "wgf/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace wgf {

bool DiagnosticsReport::all_passed() const {
    for (const CheckEntry& e : entries)
        if (e.asserted && !e.passed) return false;
    return true;
}

void DiagnosticsReport::add(CheckEntry e) { entries.push_back(std::move(e)); }

double bump(double y) {
    double r = 1.0 - y * y;
    return r <= 1e-12 ? 0.0 : std::exp(-1.0 / r);
}

double bump_deriv(double y) {
    double r = 1.0 - y * y;
    if (r <= 1e-12) return 0.0;
    return std::exp(-1.0 / r) * (-2.0 * y / (r * r));
}

double bump_deriv2(double y) {
    double r = 1.0 - y * y;
    if (r <= 1e-12) return 0.0;
    double g = -2.0 * y / (r * r);
    double gp = -2.0 / (r * r) - 8.0 * y * y / (r * r * r);
    return std::exp(-1.0 / r) * (g * g + gp);
}

namespace {

void require_span(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
        throw DegenerateInputError("test-field span must be a finite interval");
}

template <class F>
double simpson_interval(F&& f, double xa, double xb, int pieces) {
    double acc = 0.0, w = (xb - xa) / pieces;
    for (int p = 0; p < pieces; ++p) {
        double a = xa + p * w, b = a + w;
        acc += w / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    return acc;
}

// Wide tail cells get subdivided until each quadrature piece is about one
// average gap wide, so the effective resolution is uniform across the domain.
inline int cell_pieces(double gap, double ref) {
    if (!(ref > 0.0)) return 1;
    return 1 + static_cast<int>(std::min(63.0, std::floor(gap / ref)));
}

inline double mean_gap(const QuantileMeasure& mu) {
    std::size_t n = mu.size();
    if (n < 2) return 0.0;
    return (mu.position(n - 1) - mu.position(0)) / static_cast<double>(n - 1);
}

// Integral of a smooth function against the piecewise-constant density of a
// quantile measure: per-cell composite Simpson, with zero-width cells
// degenerating to the atom pairing delta * f(x).
template <class F>
double cell_integral(const QuantileMeasure& mu, F&& f) {
    double acc = 0.0;
    double d = mu.delta();
    double ref = mean_gap(mu);
    for (std::size_t c = 0; c + 1 < mu.size(); ++c) {
        double xa = mu.position(c), xb = mu.position(c + 1), gap = xb - xa;
        if (!(gap > 0.0)) {
            acc += d * f(xa);
            continue;
        }
        acc += d / gap * simpson_interval(f, xa, xb, cell_pieces(gap, ref));
    }
    return acc;
}

TestVectorField scaled_bump_field(std::string name, double c, double h) {
    TestVectorField f;
    f.name = std::move(name);
    f.value = [c, h](double x) { return bump((x - c) / h); };
    f.deriv = [c, h](double x) { return bump_deriv((x - c) / h) / h; };
    f.support_lo = c - h;
    f.support_hi = c + h;
    return f;
}

} // namespace

std::vector<TestVectorField> bump_fields(double lo, double hi) {
    require_span(lo, hi);
    double L = hi - lo, c0 = 0.5 * (lo + hi);
    std::vector<TestVectorField> fields;
    fields.push_back(scaled_bump_field("bump-wide", c0, 0.60 * L));
    fields.push_back(scaled_bump_field("bump-left", c0 - 0.25 * L, 0.35 * L));
    fields.push_back(scaled_bump_field("bump-right", c0 + 0.25 * L, 0.35 * L));
    double h = 0.55 * L;
    TestVectorField odd;
    odd.name = "bump-odd";
    odd.value = [c0, L, h](double x) {
        return (x - c0) / L * bump((x - c0) / h);
    };
    odd.deriv = [c0, L, h](double x) {
        double y = (x - c0) / h;
        return bump(y) / L + (x - c0) / L * bump_deriv(y) / h;
    };
    odd.support_lo = c0 - h;
    odd.support_hi = c0 + h;
    fields.push_back(std::move(odd));
    fields.push_back(scaled_bump_field("bump-tight", c0, 0.45 * L));
    return fields;
}

double audit_field_support(const TestVectorField& xi, double lo, double hi,
                           std::size_t samples) {
    require_span(lo, hi);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double x = lo + (hi - lo) * double(i) / double(samples - 1);
        if (x > xi.support_lo && x < xi.support_hi) continue;
        worst = std::max(worst, std::abs(xi.value(x)));
    }
    return worst;
}

std::vector<SpaceTimeTestFunction> bump_bundles(double t_hi, double lo,
                                                double hi) {
    require_span(lo, hi);
    if (!(t_hi > 0.0) || !std::isfinite(t_hi))
        throw DegenerateInputError("bundle time radius must be positive");
    double L = hi - lo, c0 = 0.5 * (lo + hi);
    struct Geom {
        const char* name;
        double c, h;
    };
    const Geom geoms[] = {{"bundle-wide", c0, 0.60 * L},
                          {"bundle-left", c0 - 0.20 * L, 0.40 * L},
                          {"bundle-right", c0 + 0.20 * L, 0.40 * L}};
    std::vector<SpaceTimeTestFunction> bundles;
    for (const Geom& g : geoms) {
        SpaceTimeTestFunction psi;
        psi.name = g.name;
        double c = g.c, h = g.h;
        psi.value = [t_hi, c, h](double t, double x) {
            return bump(t / t_hi) * bump((x - c) / h);
        };
        psi.dt = [t_hi, c, h](double t, double x) {
            return bump_deriv(t / t_hi) / t_hi * bump((x - c) / h);
        };
        psi.dx = [t_hi, c, h](double t, double x) {
            return bump(t / t_hi) * bump_deriv((x - c) / h) / h;
        };
        psi.dxx = [t_hi, c, h](double t, double x) {
            return bump(t / t_hi) * bump_deriv2((x - c) / h) / (h * h);
        };
        psi.t_hi = t_hi;
        psi.x_lo = c - h;
        psi.x_hi = c + h;
        bundles.push_back(std::move(psi));
    }
    return bundles;
}

double energy_dissipation_margin(const Trajectory& traj, int k) {
    if (k < 1 || k > traj.last_index())
        throw IndexOutOfRangeError("dissipation margin needs a step index >= 1");
    double tau = traj.tau;
    double prev = traj.energy_of(k - 1);
    double cur = traj.energy_of(k);
    if (std::isinf(prev) && !std::isinf(cur)) return prev;
    double inc = w2(traj.state(k - 1), traj.state(k));
    double margin = prev - cur - inc * inc / (2.0 * tau);
    if (traj.scheme == Scheme::bdf2) {
        double back = w2(traj.state(k - 2), traj.state(k - 1));
        margin += back * back / (4.0 * tau);
    }
    return margin;
}

DiagnosticsReport classical_bounds_report(const Trajectory& traj,
                                          const EnergySpec& spec, double T) {
    const double t_cut = T + 1e-12;
    double kinetic = 0.0, max_internal = 0.0, max_m2 = 0.0;
    int k_lo = traj.scheme == Scheme::bdf2 ? -1 : 0;
    for (int k = k_lo; k <= traj.last_index(); ++k) {
        if (traj.time_of(k) > t_cut) break;
        const QuantileMeasure& mu = traj.state(k);
        max_m2 = std::max(max_m2, second_moment(mu));
        if (spec.has_internal()) {
            double u;
            try {
                u = std::abs(internal(mu, *spec.m));
            } catch (const SingularMeasureError&) {
                u = std::numeric_limits<double>::infinity();
            }
            max_internal = std::max(max_internal, u);
        }
        if (k >= 1) {
            double inc = w2(traj.state(k - 1), mu);
            kinetic += inc * inc / (2.0 * traj.tau);
        }
    }
    DiagnosticsReport report;
    report.add({"kinetic-sum", kinetic, 0.0, T, false, true});
    if (spec.has_internal())
        report.add({"max-internal-energy", max_internal, 0.0, T, false, true});
    report.add({"max-second-moment", max_m2, 0.0, T, false, true});
    return report;
}

double el_residual(const QuantileMeasure& rho, const QuantileMeasure& nu,
                   const QuantileMeasure& eta, double tau,
                   const EnergySpec& spec, const TestVectorField& xi) {
    std::size_t n = rho.size();
    if (nu.size() != n || eta.size() != n)
        throw GridMismatchError("residual needs all three states on one grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = rho.position(i);
        double v = xi.value(x);
        if (v == 0.0) continue;
        double drift = (2.0 / tau) * (x - nu.position(i)) -
                       (0.5 / tau) * (x - eta.position(i));
        if (spec.external) drift += spec.external->deriv(x);
        if (spec.interaction) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                s += rho.weight(j) * spec.interaction->deriv(x - rho.position(j));
            drift += s;
        }
        acc += rho.weight(i) * v * drift;
    }
    if (spec.has_internal()) {
        if (rho.has_atom())
            throw SingularMeasureError("residual needs a density but the state has atoms");
        double m = *spec.m, d = rho.delta();
        for (std::size_t c = 0; c + 1 < n; ++c) {
            double gap = rho.position(c + 1) - rho.position(c);
            double mid = 0.5 * (rho.position(c) + rho.position(c + 1));
            acc -= std::pow(d / gap, m) * gap * xi.deriv(mid);
        }
    }
    return std::abs(acc);
}

double el_optimizer_component(const QuantileMeasure& rho,
                              const QuantileMeasure& nu,
                              const QuantileMeasure& eta, double tau,
                              const EnergySpec& spec,
                              const TestVectorField& xi) {
    std::vector<double> g = penalization_gradient(tau, eta, nu, rho, spec);
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
        acc += std::abs(xi.value(rho.position(i))) * std::abs(g[i]);
    return acc;
}

double bv_norm(const QuantileMeasure& mu, double m) {
    if (mu.has_atom())
        throw SingularMeasureError("BV norm needs a density but the measure has atoms");
    double d = mu.delta();
    double l1 = 0.0, tv = 0.0, prev = 0.0;
    for (std::size_t c = 0; c + 1 < mu.size(); ++c) {
        double gap = mu.position(c + 1) - mu.position(c);
        double v = std::pow(d / gap, m);
        l1 += v * gap;
        tv += std::abs(v - prev);
        prev = v;
    }
    tv += prev;
    return l1 + tv;
}

double bv_step_bound_margin(const Trajectory& traj, int k, double m, double C) {
    if (k < 1 || k > traj.last_index())
        throw IndexOutOfRangeError("BV bound needs a step index >= 1");
    int k_lo = traj.scheme == Scheme::bdf2 ? -1 : 0;
    double inc1 = w2(traj.state(k), traj.state(k - 1));
    double inc2 = w2(traj.state(k), traj.state(std::max(k - 2, k_lo)));
    double rhs = C * (1.0 + inc1 / traj.tau + inc2 / traj.tau);
    return rhs - bv_norm(traj.state(k), m);
}

double min_bv_constant(const Trajectory& traj, double m) {
    int k_lo = traj.scheme == Scheme::bdf2 ? -1 : 0;
    double worst = 0.0;
    for (int k = 1; k <= traj.last_index(); ++k) {
        double inc1 = w2(traj.state(k), traj.state(k - 1));
        double inc2 = w2(traj.state(k), traj.state(std::max(k - 2, k_lo)));
        double denom = 1.0 + inc1 / traj.tau + inc2 / traj.tau;
        worst = std::max(worst, bv_norm(traj.state(k), m) / denom);
    }
    return worst;
}

double weak_form_residual(const Trajectory& traj, const EnergySpec& spec,
                          const SpaceTimeTestFunction& psi, double T) {
    double lhs = 0.0, rhs = 0.0;
    double t_stop = std::min(T, psi.t_hi) + 1e-12;
    int k0 = traj.scheme == Scheme::bdf2 ? 0 : 1;
    for (int k = k0; k <= traj.last_index(); ++k) {
        double a = traj.time_of(k - 1), b = traj.time_of(k);
        if (b <= a) continue;
        if (a >= t_stop) break;
        const QuantileMeasure& mu = traj.state(k);
        std::size_t n = mu.size();
        if (spec.has_internal() && mu.has_atom())
            throw SingularMeasureError("weak form needs densities but a state has atoms");
        const bool has_drift = bool(spec.external) || bool(spec.interaction);
        auto drift_at = [&](double x) {
            double v = 0.0;
            if (spec.external) v += spec.external->deriv(x);
            if (spec.interaction)
                for (std::size_t j = 0; j < n; ++j)
                    v += mu.weight(j) *
                         spec.interaction->deriv(x - mu.position(j));
            return v;
        };
        // Both spatial integrals treat the state as its piecewise-constant
        // density: the diffusion pairing integrates psi'' exactly per cell
        // and the drift pairing uses a per-cell composite Simpson rule, so
        // wide tail cells cannot pollute the balance.
        auto space = [&](double t) {
            double acc = 0.0;
            double d = mu.delta();
            double ref = mean_gap(mu);
            for (std::size_t c = 0; c + 1 < n; ++c) {
                double xa = mu.position(c), xb = mu.position(c + 1);
                double gap = xb - xa;
                if (spec.has_internal())
                    acc -= std::pow(d / gap, *spec.m) *
                           (psi.dx(t, xb) - psi.dx(t, xa));
                if (has_drift) {
                    auto g = [&](double x) { return psi.dx(t, x) * drift_at(x); };
                    if (gap > 0.0)
                        acc += d / gap *
                               simpson_interval(g, xa, xb, cell_pieces(gap, ref));
                    else
                        acc += d * g(xa);
                }
            }
            return acc;
        };
        lhs += (b - a) / 6.0 * (space(a) + 4.0 * space(0.5 * (a + b)) + space(b));
        rhs += cell_integral(mu, [&](double x) {
            return psi.value(b, x) - psi.value(a, x);
        });
    }
    const QuantileMeasure& init =
        traj.state(traj.scheme == Scheme::bdf2 ? -1 : 0);
    rhs += cell_integral(init, [&](double x) { return psi.value(0.0, x); });
    return std::abs(lhs - rhs);
}

} // namespace wgf
