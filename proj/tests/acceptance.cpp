// Acceptance gate: one pass/fail line per criterion, pinned tolerances.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/driver.hpp"
#include "wgf/energy.hpp"
#include "wgf/reference.hpp"
#include "wgf/stepper.hpp"
#include "wgf/transport.hpp"

using namespace wgf;
namespace fs = std::filesystem;

namespace {

constexpr double kTolExtrapolation = 1e-10; // c1: energy-free two-step update
constexpr double kTolParticle = 1e-8;       // c1: single-particle closed forms
constexpr double kDissipationScale = 10.0;  // c2: margin >= -10 tol (1 + |F|)
constexpr double kClassicalSpread = 0.10;   // c3: max/min - 1 across steps
constexpr double kTolElResidual = 1e-3;     // c4: residual per bump field
constexpr double kElReduction = 10.0;       // c4: optimizer-part shrink factor
constexpr double kTolHeatL1 = 5e-2;         // c5
constexpr double kTolHeatW2 = 2e-2;         // c5
constexpr double kJkoOrderLo = 0.8, kJkoOrderHi = 1.2;   // c6
constexpr double kBdf2OrderLo = 1.7, kBdf2OrderHi = 2.3; // c6
constexpr double kTolBarenblattL1 = 1e-1;   // c7
constexpr double kTolRadius = 5e-2;         // c7
constexpr double kMetricSlack = 1e-12;      // c8: fp slack scale
constexpr double kTolGradient = 1e-6;       // c9

struct Gate {
    int failed = 0;

    void report(int id, const std::string& label, bool ok,
                const std::string& detail) {
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << id << ": "
                  << label << " | " << detail << "\n"
                  << std::flush;
        if (!ok) ++failed;
    }

    template <typename Fn>
    void criterion(int id, const std::string& label, Fn&& fn) {
        try {
            auto [ok, detail] = fn();
            report(id, label, ok, detail);
        } catch (const std::exception& e) {
            report(id, label, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start)
            .count();
    }
};

EnergySpec entropy_spec() {
    EnergySpec spec;
    spec.m = 1.0;
    return spec;
}

StepperConfig stepper(double tau, double d1, double d2,
                      double grad_tol = 1e-9) {
    StepperConfig cfg;
    cfg.tau = tau;
    cfg.grad_tol = grad_tol;
    cfg.d1 = d1;
    cfg.d2 = d2;
    return cfg;
}

Trajectory heat_run(std::size_t n, double tau, double T, Scheme s,
                    double grad_tol = 1e-9,
                    Initializer init = Initializer::duplicate) {
    return run(discretize(gaussian_heat(0.0, 0.0, 1.0), n), T, s,
               entropy_spec(), stepper(tau, 0.0, 1.0, grad_tol), init);
}

double worst_margin_deficit(const Trajectory& traj, double grad_tol) {
    // largest violation of margin >= -10 grad_tol (1 + |F|), negative is slack
    double worst = -std::numeric_limits<double>::infinity();
    for (const StepRecord& rec : traj.records) {
        double tol = kDissipationScale * grad_tol * (1.0 + std::abs(rec.energy));
        worst = std::max(worst, -rec.dissipation_margin - tol);
    }
    return worst;
}

} // namespace

int main() {
    Gate gate;

    gate.criterion(1, "closed-form step identities", [] {
        Timer timer;
        testsup::Rng rng(201);
        double worst_ex = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            QuantileMeasure eta = testsup::random_measure(rng, 50);
            double a = rng.uniform(0.5, 1.5), b = rng.uniform(-1.0, 1.0);
            std::vector<double> mapped = eta.positions();
            for (double& p : mapped) p = a * p + b;
            QuantileMeasure nu = from_quantiles(mapped, Domain::line());
            StepperConfig cfg = stepper(0.05, 0.0, 0.0);
            StepResult res = bdf2_step(cfg.tau, eta, nu, EnergySpec{}, cfg);
            for (std::size_t i = 0; i < res.state.size(); ++i) {
                double want = (4.0 * nu.position(i) - eta.position(i)) / 3.0;
                worst_ex = std::max(worst_ex,
                                    std::abs(res.state.position(i) - want));
            }
        }

        double tau = 0.05, y = 1.3, z = 1.7, worst_pt = 0.0;
        EnergySpec well;
        well.external = catalog_potential("quadratic");
        StepperConfig cfg = stepper(tau, 0.5, 0.0);
        QuantileMeasure ny = from_quantiles({y, y}, Domain::line());
        QuantileMeasure nz = from_quantiles({z, z}, Domain::line());
        StepResult one = jko_step(tau, ny, well, cfg);
        StepResult two = bdf2_step(tau, nz, ny, well, cfg);
        for (std::size_t i = 0; i < 2; ++i) {
            worst_pt = std::max(worst_pt, std::abs(one.state.position(i) -
                                                   y / (1.0 + tau)));
            worst_pt = std::max(
                worst_pt, std::abs(two.state.position(i) -
                                   (4.0 * y - z) / (3.0 + 2.0 * tau)));
        }
        double secs = timer.seconds();
        bool ok = worst_ex <= kTolExtrapolation && worst_pt <= kTolParticle &&
                  secs < 1.0;
        return std::pair(ok, "extrapolation gap " + fmt(worst_ex) +
                                 ", particle gap " + fmt(worst_pt) + ", " +
                                 fmt(secs) + " s (budget 1 s)");
    });

    gate.criterion(2, "almost-energy-diminishing margins", [] {
        Timer timer;
        const std::size_t n = 200;
        const double tau = 2e-3, T = 0.5, grad_tol = 1e-9;
        QuantileMeasure gauss = discretize(gaussian_heat(0.0, 0.0, 1.0), n);

        EnergySpec porous;
        porous.m = 2.0;
        EnergySpec ou = entropy_spec();
        ou.external = catalog_potential("quadratic");
        EnergySpec agg;
        agg.interaction = catalog_potential("quadratic");

        struct Case {
            const char* name;
            EnergySpec spec;
            double d1, d2;
        };
        std::vector<Case> cases = {{"heat", entropy_spec(), 0.0, 1.0},
                                   {"porous", porous, 0.0, 1.0},
                                   {"ou", ou, 0.5, 1.0},
                                   {"aggregation", agg, 0.5, 0.0}};
        double worst = -std::numeric_limits<double>::infinity();
        std::string at;
        for (const Case& c : cases) {
            Trajectory traj = run(gauss, T, Scheme::bdf2, c.spec,
                                  stepper(tau, c.d1, c.d2, grad_tol));
            double deficit = worst_margin_deficit(traj, grad_tol);
            if (deficit > worst) {
                worst = deficit;
                at = c.name;
            }
        }
        double secs = timer.seconds();
        bool ok = worst <= 0.0 && secs < 120.0;
        return std::pair(ok, "worst margin deficit " + fmt(worst) + " (" + at +
                                 "), " + fmt(secs) + " s (budget 120 s)");
    });

    gate.criterion(3, "classical estimates stable across tau", [] {
        std::vector<double> taus = {4e-3, 2e-3, 1e-3};
        std::vector<double> kinetic, max_u, max_m2;
        for (double tau : taus) {
            Trajectory traj = heat_run(200, tau, 0.5, Scheme::bdf2);
            DiagnosticsReport rep =
                classical_bounds_report(traj, entropy_spec(), 0.5);
            kinetic.push_back(rep.entries[0].margin);
            max_u.push_back(rep.entries[1].margin);
            max_m2.push_back(rep.entries[2].margin);
        }
        auto spread = [](const std::vector<double>& v) {
            auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi / *lo - 1.0;
        };
        double sk = spread(kinetic), su = spread(max_u), sm = spread(max_m2);
        bool ok = sk <= kClassicalSpread && su <= kClassicalSpread &&
                  sm <= kClassicalSpread;
        return std::pair(ok, "spread kinetic " + fmt(sk) + ", internal " +
                                 fmt(su) + ", second moment " + fmt(sm) +
                                 " (cap 0.1)");
    });

    gate.criterion(4, "stationarity residual and optimizer part", [] {
        auto field_maxima = [](const Trajectory& traj) {
            const QuantileMeasure& start = traj.state(-1);
            std::vector<TestVectorField> fields = bump_fields(
                start.positions().front(), start.positions().back());
            std::vector<double> res(fields.size(), 0.0),
                opt(fields.size(), 0.0);
            for (std::size_t f = 0; f < fields.size(); ++f) {
                for (int k = 1; k <= traj.last_index(); ++k) {
                    res[f] = std::max(
                        res[f],
                        el_residual(traj.state(k), traj.state(k - 1),
                                    traj.state(k - 2), traj.tau,
                                    entropy_spec(), fields[f]));
                    opt[f] = std::max(
                        opt[f], el_optimizer_component(
                                    traj.state(k), traj.state(k - 1),
                                    traj.state(k - 2), traj.tau,
                                    entropy_spec(), fields[f]));
                }
            }
            return std::pair(res, opt);
        };
        Trajectory loose = heat_run(200, 2e-3, 0.5, Scheme::bdf2, 1e-9);
        Trajectory tight = heat_run(200, 2e-3, 0.5, Scheme::bdf2, 1e-11);
        auto [res9, opt9] = field_maxima(loose);
        auto [res11, opt11] = field_maxima(tight);
        double worst_res = *std::max_element(res9.begin(), res9.end());
        double worst_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t f = 0; f < opt9.size(); ++f)
            worst_ratio = std::min(worst_ratio, opt9[f] / opt11[f]);
        bool ok = worst_res <= kTolElResidual && worst_ratio >= kElReduction;
        return std::pair(ok, "max residual " + fmt(worst_res) +
                                 " (cap 1e-3), optimizer-part reduction " +
                                 fmt(worst_ratio) + "x (need 10x)");
    });

    gate.criterion(5, "heat-equation accuracy", [] {
        Timer timer;
        Snapshot snap = gaussian_heat(0.5, 0.0, 1.0);
        Trajectory jko = heat_run(400, 1e-3, 0.5, Scheme::jko);
        Trajectory two = heat_run(400, 1e-3, 0.5, Scheme::bdf2, 1e-9,
                                  Initializer::jko_substep);
        const QuantileMeasure& tj = jko.state(jko.last_index());
        const QuantileMeasure& tb = two.state(two.last_index());
        double l1 = l1_error(tb, snap);
        double w2b = w2_error(tb, snap);
        double w2j = w2_error(tj, snap);
        double secs = timer.seconds();
        bool ok = l1 <= kTolHeatL1 && w2b <= kTolHeatW2 && w2b <= w2j &&
                  secs < 300.0;
        return std::pair(ok, "L1 " + fmt(l1) + " (cap 5e-2), W2 bdf2 " +
                                 fmt(w2b) + " vs jko " + fmt(w2j) +
                                 " (cap 2e-2), " + fmt(secs) +
                                 " s (budget 300 s)");
    });

    gate.criterion(6, "temporal order on the particle problem", [] {
        Timer timer;
        EnergySpec well;
        well.external = catalog_potential("quadratic");
        const double x0 = 1.5, T = 1.0;
        const double exact = x0 * std::exp(-T);
        QuantileMeasure start = from_quantiles({x0, x0}, Domain::line());
        std::vector<double> taus, err_jko, err_bdf2;
        for (int k = 4; k <= 9; ++k) {
            double tau = std::ldexp(1.0, -k);
            taus.push_back(tau);
            for (Scheme s : {Scheme::jko, Scheme::bdf2}) {
                Trajectory traj = run(start, T, s, well, stepper(tau, 0.5, 0.0),
                                      Initializer::jko_substep);
                double got = traj.state(traj.last_index()).position(0);
                (s == Scheme::jko ? err_jko : err_bdf2)
                    .push_back(std::abs(got - exact));
            }
        }
        double p1 = empirical_order(taus, err_jko);
        double p2 = empirical_order(taus, err_bdf2);
        double secs = timer.seconds();
        bool ok = p1 >= kJkoOrderLo && p1 <= kJkoOrderHi &&
                  p2 >= kBdf2OrderLo && p2 <= kBdf2OrderHi && secs < 60.0;
        return std::pair(ok, "order jko " + fmt(p1) +
                                 " (window 0.8..1.2), bdf2 " + fmt(p2) +
                                 " (window 1.7..2.3), " + fmt(secs) +
                                 " s (budget 60 s)");
    });

    gate.criterion(7, "Barenblatt profile tracking", [] {
        Timer timer;
        const double t0 = 0.25, T = 0.75;
        EnergySpec porous;
        porous.m = 2.0;
        Trajectory traj = run(discretize(barenblatt_m2(t0), 400), T,
                              Scheme::bdf2, porous, stepper(1e-3, 0.0, 1.0));
        Snapshot snap = barenblatt_m2(t0 + T);
        const QuantileMeasure& terminal = traj.state(traj.last_index());
        double l1 = l1_error(terminal, snap);
        double radius = 0.5 * (terminal.positions().back() -
                               terminal.positions().front());
        double rel = std::abs(radius - snap.support().second) /
                     snap.support().second;
        double secs = timer.seconds();
        bool ok = l1 <= kTolBarenblattL1 && rel <= kTolRadius && secs < 300.0;
        return std::pair(ok, "L1 " + fmt(l1) + " (cap 0.1), radius error " +
                                 fmt(rel) + " (cap 0.05), " + fmt(secs) +
                                 " s (budget 300 s)");
    });

    gate.criterion(8, "metric and inequality property suites", [] {
        Timer timer;
        testsup::Rng rng(211);
        double worst = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 1000; ++trial) {
            QuantileMeasure a = testsup::random_measure(rng, 50);
            QuantileMeasure b = testsup::random_measure(rng, 50);
            QuantileMeasure c = testsup::random_measure(rng, 50);
            double slack = kMetricSlack * (1.0 + second_moment(a) +
                                           second_moment(b) + second_moment(c));
            worst = std::max(worst, std::abs(w2(a, b) - w2(b, a)));
            worst = std::max(worst, w2(a, a));
            worst = std::max(worst, w2(a, c) - w2(a, b) - w2(b, c) - slack);
            worst = std::max(worst, -check_triangle_binomial(a, b, c) - slack);
            auto [lo, hi] = check_moment_distance_bound(c, b);
            worst = std::max(worst, -lo - slack);
            worst = std::max(worst, -hi - slack);
        }

        bool perm_ok = true;
        for (std::size_t n = 2; n <= 6 && perm_ok; ++n) {
            for (int trial = 0; trial < 20 && perm_ok; ++trial) {
                std::vector<double> x(n), y(n);
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] = rng.uniform(-5.0, 5.0);
                    y[i] = rng.uniform(-5.0, 5.0);
                }
                std::sort(x.begin(), x.end());
                std::sort(y.begin(), y.end());
                auto cost = [&](const std::vector<double>& p) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        acc += (x[i] - p[i]) * (x[i] - p[i]);
                    return acc;
                };
                double best = cost(y);
                std::vector<double> perm = y;
                do {
                    if (cost(perm) < best - 1e-12) perm_ok = false;
                } while (std::next_permutation(perm.begin(), perm.end()));
            }
        }
        double secs = timer.seconds();
        bool ok = worst <= 0.0 && perm_ok && secs < 60.0;
        return std::pair(ok, "worst axiom violation " + fmt(worst) +
                                 ", permutations " +
                                 (perm_ok ? "optimal" : "BEATEN") + ", " +
                                 fmt(secs) + " s (budget 60 s)");
    });

    gate.criterion(9, "gradients match central differences", [] {
        testsup::Rng rng(221);
        double worst = 0.0;
        for (double m : {1.0, 1.5, 2.0, 3.0}) {
            EnergySpec spec;
            spec.m = m;
            spec.external = catalog_potential("quadratic");
            spec.interaction = catalog_potential("gaussian_kernel", 0.8);
            for (int trial = 0; trial < 25; ++trial) {
                QuantileMeasure eta = testsup::random_measure(rng, 20);
                QuantileMeasure nu = testsup::random_measure(rng, 20);
                QuantileMeasure rho = testsup::random_measure(rng, 20);
                double tau = 0.1;
                std::vector<double> ge = gradient_total(rho, spec);
                std::vector<double> gp =
                    penalization_gradient(tau, eta, nu, rho, spec);
                double scale_e = 0.0, scale_p = 0.0, diff_e = 0.0, diff_p = 0.0;
                for (double v : ge) scale_e = std::max(scale_e, std::abs(v));
                for (double v : gp) scale_p = std::max(scale_p, std::abs(v));
                for (std::size_t i = 0; i < rho.size(); ++i) {
                    double h = testsup::fd_step(rho.positions(), i);
                    std::vector<double> up = rho.positions(),
                                        dn = rho.positions();
                    up[i] += h;
                    dn[i] -= h;
                    QuantileMeasure mu = from_quantiles(up, rho.domain());
                    QuantileMeasure md = from_quantiles(dn, rho.domain());
                    diff_e = std::max(
                        diff_e, std::abs((total(mu, spec) - total(md, spec)) /
                                             (2.0 * h) -
                                         ge[i]));
                    diff_p = std::max(
                        diff_p,
                        std::abs((penalization(tau, eta, nu, mu, spec) -
                                  penalization(tau, eta, nu, md, spec)) /
                                     (2.0 * h) -
                                 gp[i]));
                }
                worst = std::max(worst, diff_e / (1.0 + scale_e));
                worst = std::max(worst, diff_p / (1.0 + scale_p));
            }
        }
        bool ok = worst <= kTolGradient;
        return std::pair(ok,
                         "worst relative gap " + fmt(worst) + " (cap 1e-6)");
    });

    gate.criterion(10, "weak-form residual decreases under refinement", [] {
        // Span kept inside the bulk that even the coarsest grid resolves, so
        // refinement sharpens the balance instead of reaching new territory.
        std::vector<SpaceTimeTestFunction> bundles =
            bump_bundles(0.45, -2.0, 2.0);
        struct Level {
            double tau;
            std::size_t n;
        };
        std::vector<Level> levels = {{4e-3, 100}, {2e-3, 200}, {1e-3, 400}};
        std::vector<std::vector<double>> residual(
            levels.size(), std::vector<double>(bundles.size()));
        for (std::size_t l = 0; l < levels.size(); ++l) {
            Trajectory traj =
                heat_run(levels[l].n, levels[l].tau, 0.5, Scheme::bdf2);
            for (std::size_t b = 0; b < bundles.size(); ++b)
                residual[l][b] =
                    weak_form_residual(traj, entropy_spec(), bundles[b], 0.5);
        }
        bool ok = true;
        std::ostringstream detail;
        for (std::size_t b = 0; b < bundles.size(); ++b) {
            if (!(residual[0][b] > residual[1][b] &&
                  residual[1][b] > residual[2][b]))
                ok = false;
            if (b) detail << "; ";
            detail << bundles[b].name << " " << fmt(residual[0][b]) << " > "
                   << fmt(residual[1][b]) << " > " << fmt(residual[2][b]);
        }
        return std::pair(ok, detail.str());
    });

    gate.criterion(11, "byte-identical rerun artifacts", [] {
        fs::path dir = fs::temp_directory_path() / "wgf-acceptance-rerun";
        fs::remove_all(dir);
        fs::create_directories(dir);
        {
            std::ofstream cfg(dir / "run.cfg");
            cfg << "problem.m = 1\n"
                   "problem.initial = gaussian\n"
                   "problem.initial_params = 0 1\n"
                   "discretization.n = 100\n"
                   "discretization.tau = 2e-3\n"
                   "discretization.t_final = 0.02\n"
                   "discretization.scheme = bdf2\n";
        }
        int rc_a = cmd_run((dir / "run.cfg").string(), (dir / "a").string(),
                           false, true);
        int rc_b = cmd_run((dir / "run.cfg").string(), (dir / "b").string(),
                           false, true);
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream acc;
            acc << in.rdbuf();
            return acc.str();
        };
        bool same_states = slurp(dir / "a" / "states.csv") ==
                           slurp(dir / "b" / "states.csv");
        bool same_scalars = slurp(dir / "a" / "scalars.csv") ==
                            slurp(dir / "b" / "scalars.csv");
        bool nonempty = !slurp(dir / "a" / "states.csv").empty();
        bool ok =
            rc_a == 0 && rc_b == 0 && same_states && same_scalars && nonempty;
        return std::pair(ok, std::string("exit codes ") + fmt(rc_a) + "/" +
                                 fmt(rc_b) + ", states " +
                                 (same_states ? "identical" : "DIFFER") +
                                 ", scalars " +
                                 (same_scalars ? "identical" : "DIFFER"));
    });

    std::cout << (11 - gate.failed) << "/11 criteria passed\n";
    return gate.failed == 0 ? 0 : 1;
}
