#include "wgf/driver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "wgf/config.hpp"
#include "wgf/diagnostics.hpp"
#include "wgf/reference.hpp"
#include "wgf/runio.hpp"

namespace wgf {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr double kElTolerance = 1e-3;
constexpr double kMetricSlack = 1e-12;

double dissipation_tolerance(double grad_tol, double energy) {
    double scale = std::isfinite(energy) ? std::abs(energy) : 0.0;
    return 10.0 * grad_tol * (1.0 + scale);
}

ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

struct BatteryOptions {
    DiagnosticsToggles toggles;
    double grad_tol = 1e-9;
    double t_final = 0.0;
};

DiagnosticsReport run_battery(const Trajectory& traj, const EnergySpec& spec,
                              const BatteryOptions& opt) {
    DiagnosticsReport rep;
    const int k_lo = traj.scheme == Scheme::bdf2 ? -1 : 0;
    const int last = traj.last_index();
    if (opt.toggles.dissipation) {
        for (int k = 1; k <= last; ++k) {
            double margin = energy_dissipation_margin(traj, k);
            double tol = dissipation_tolerance(opt.grad_tol, traj.energy_of(k));
            rep.add({"energy-dissipation", margin, tol, double(k), true,
                     margin >= -tol});
        }
    }
    if (opt.toggles.inequalities) {
        for (int k = k_lo + 2; k <= last; ++k) {
            const QuantileMeasure& eta = traj.state(k - 2);
            const QuantileMeasure& nu = traj.state(k - 1);
            const QuantileMeasure& rho = traj.state(k);
            double margin = check_triangle_binomial(eta, nu, rho);
            double tol = kMetricSlack * (1.0 + second_moment(eta) +
                                         second_moment(nu) + second_moment(rho));
            rep.add({"metric-binomial", margin, tol, double(k), true,
                     margin >= -tol});
        }
        for (int k = k_lo + 1; k <= last; ++k) {
            const QuantileMeasure& rho = traj.state(k);
            const QuantileMeasure& nu = traj.state(k - 1);
            auto [lo, hi] = check_moment_distance_bound(rho, nu);
            double tol = kMetricSlack *
                         (1.0 + second_moment(rho) + second_moment(nu));
            rep.add({"moment-distance-lower", lo, tol, double(k), true,
                     lo >= -tol});
            rep.add({"moment-distance-upper", hi, tol, double(k), true,
                     hi >= -tol});
        }
    }
    if (opt.toggles.classical) {
        DiagnosticsReport classical =
            classical_bounds_report(traj, spec, opt.t_final);
        for (CheckEntry& e : classical.entries) rep.add(std::move(e));
    }
    if (opt.toggles.bv && spec.has_internal()) {
        try {
            rep.add({"bv-min-constant", min_bv_constant(traj, *spec.m), 0.0,
                     0.0, false, true});
        } catch (const SingularMeasureError&) {
            rep.add({"bv-min-constant",
                     std::numeric_limits<double>::infinity(), 0.0, 0.0, false,
                     true});
        }
    }
    const QuantileMeasure& start = traj.state(k_lo);
    double span_lo = start.positions().front();
    double span_hi = start.positions().back();
    bool have_span = span_hi - span_lo > 1e-9;
    if (opt.toggles.el_residual && traj.scheme == Scheme::bdf2 && have_span &&
        last >= 1) {
        for (const TestVectorField& xi : bump_fields(span_lo, span_hi)) {
            double worst = 0.0, worst_opt = 0.0;
            int at = 1;
            for (int k = 1; k <= last; ++k) {
                double r = el_residual(traj.state(k), traj.state(k - 1),
                                       traj.state(k - 2), traj.tau, spec, xi);
                if (r > worst) {
                    worst = r;
                    at = k;
                }
                worst_opt = std::max(
                    worst_opt,
                    el_optimizer_component(traj.state(k), traj.state(k - 1),
                                           traj.state(k - 2), traj.tau, spec,
                                           xi));
            }
            rep.add({"el-residual/" + xi.name, kElTolerance - worst,
                     kElTolerance, double(at), true, worst <= kElTolerance});
            rep.add({"el-optimizer-part/" + xi.name, worst_opt, 0.0,
                     double(at), false, true});
        }
    }
    if (opt.toggles.weak_form && have_span && opt.t_final > 0.0) {
        for (const SpaceTimeTestFunction& psi :
             bump_bundles(0.9 * opt.t_final, span_lo, span_hi)) {
            double r;
            try {
                r = weak_form_residual(traj, spec, psi, opt.t_final);
            } catch (const SingularMeasureError&) {
                r = std::numeric_limits<double>::infinity();
            }
            rep.add({"weak-form/" + psi.name, r, 0.0, opt.t_final, false, true});
        }
    }
    return rep;
}

ordered_json report_json(const DiagnosticsReport& rep) {
    ordered_json entries = ordered_json::array();
    for (const CheckEntry& e : rep.entries) {
        ordered_json j;
        j["name"] = e.name;
        j["margin"] = json_number(e.margin);
        j["tolerance"] = json_number(e.tolerance);
        j["location"] = json_number(e.location);
        j["asserted"] = e.asserted;
        j["passed"] = e.passed;
        entries.push_back(std::move(j));
    }
    ordered_json out;
    out["all_passed"] = rep.all_passed();
    out["entries"] = std::move(entries);
    return out;
}

ordered_json config_echo(const RunConfig& cfg) {
    ordered_json echo = ordered_json::object();
    for (const auto& [key, value] : cfg.raw) echo[key] = value;
    return echo;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

int run_one_scheme(const RunConfig& cfg, const Problem& prob, Scheme scheme,
                   const fs::path& dir, bool quiet) {
    StepperConfig scfg = make_stepper(cfg, prob, cfg.tau);
    Trajectory traj;
    bool partial = false;
    std::string note;
    try {
        traj = run(prob.initial, cfg.t_final, scheme, prob.spec, scfg,
                   initializer_from_name(cfg.initializer));
    } catch (const RunAbortedError& e) {
        traj = e.partial();
        partial = true;
        note = e.what();
    }

    fs::create_directories(dir);
    bool json = cfg.format == "json";
    std::string states_name = json ? "states.json" : "states.csv";
    std::string scalars_name = json ? "scalars.json" : "scalars.csv";
    write_states((dir / states_name).string(), traj, json);
    write_scalars((dir / scalars_name).string(), traj, prob.spec, json);

    BatteryOptions opt{cfg.diagnostics, cfg.grad_tol, cfg.t_final};
    DiagnosticsReport rep = run_battery(traj, prob.spec, opt);

    double total_iters = traj.init_iterations, max_grad = 0.0;
    for (const StepRecord& r : traj.records) {
        total_iters += r.iterations;
        max_grad = std::max(max_grad, r.grad_sup);
    }

    ordered_json manifest;
    manifest["command"] = "run";
    manifest["config"] = config_echo(cfg);
    ordered_json derived;
    derived["scheme"] = scheme_name(scheme);
    derived["initializer"] = cfg.initializer;
    derived["n"] = cfg.n;
    derived["tau"] = json_number(cfg.tau);
    derived["t_final"] = json_number(cfg.t_final);
    derived["steps"] = traj.last_index();
    derived["d1"] = json_number(prob.d1);
    derived["d2"] = json_number(prob.d2);
    derived["d3"] = json_number(prob.d3);
    derived["d4"] = json_number(prob.d4);
    derived["tau_star"] = json_number(prob.tau_star);
    derived["partial"] = partial;
    if (!note.empty()) derived["abort_reason"] = note;
    derived["init_iterations"] = traj.init_iterations;
    derived["total_iterations"] = int(total_iters);
    derived["max_grad_sup"] = json_number(max_grad);
    manifest["derived"] = std::move(derived);
    manifest["diagnostics"] = report_json(rep);
    ordered_json files;
    files["format"] = cfg.format;
    files["states"] = states_name;
    files["scalars"] = scalars_name;
    manifest["files"] = std::move(files);
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    if (!quiet) {
        std::cout << "run " << scheme_name(scheme) << ": " << traj.last_index()
                  << " steps to t = " << format_double(traj.times.back())
                  << (partial ? " (partial)" : "") << ", artifacts in "
                  << dir.string() << "\n";
    }
    if (partial) {
        std::cerr << note << "\n";
        return 3;
    }
    return 0;
}

Snapshot reference_at(const RunConfig& cfg, double t) {
    const std::vector<double>& p = cfg.initial_params;
    if (cfg.reference == "gaussian_heat") return gaussian_heat(t, p[0], p[1]);
    if (cfg.reference == "ornstein_uhlenbeck")
        return ornstein_uhlenbeck(t, p[0], p[1]);
    if (cfg.reference == "barenblatt_m2") return barenblatt_m2(p[0] + t);
    return ou_particle(t, p[0]);
}

void check_reference_compat(const RunConfig& cfg) {
    auto fail = [&](const std::string& what) {
        throw ConfigError("compare.reference '" + cfg.reference + "': " + what);
    };
    bool pot_zero = cfg.potential == "zero";
    bool pot_well = cfg.potential == "quadratic" && cfg.potential_scale == 1.0;
    bool int_zero = cfg.interaction == "zero";
    if (!int_zero) fail("needs no interaction kernel");
    if (cfg.reference == "gaussian_heat") {
        if (cfg.initial != "gaussian" || !cfg.m || *cfg.m != 1.0 || !pot_zero)
            fail("needs a gaussian initial, m = 1 and no potential");
    } else if (cfg.reference == "ornstein_uhlenbeck") {
        if (cfg.initial != "gaussian" || !cfg.m || *cfg.m != 1.0 || !pot_well)
            fail("needs a gaussian initial, m = 1 and the unit quadratic well");
    } else if (cfg.reference == "barenblatt_m2") {
        if (cfg.initial != "barenblatt" || !cfg.m || *cfg.m != 2.0 || !pot_zero)
            fail("needs a barenblatt initial and m = 2");
    } else if (cfg.reference == "ou_particle") {
        if (cfg.initial != "point" || cfg.m || !pot_well)
            fail("needs a point initial, no internal energy and the unit "
                 "quadratic well");
    }
}

} // namespace

int cmd_run(const std::string& config_path, const std::string& out_override,
            bool override_tau_guard, bool quiet) {
    RunConfig cfg;
    std::optional<Problem> prob;
    try {
        cfg = parse_config_file(config_path);
        if (override_tau_guard) cfg.override_tau_guard = true;
        if (!out_override.empty()) cfg.out_dir = out_override;
        prob = build_problem(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::vector<Scheme> schemes;
    if (cfg.scheme == "both")
        schemes = {Scheme::jko, Scheme::bdf2};
    else
        schemes = {scheme_from_name(cfg.scheme)};
    int worst = 0;
    for (Scheme s : schemes) {
        fs::path dir = cfg.out_dir;
        if (schemes.size() > 1) dir /= scheme_name(s);
        try {
            worst = std::max(worst, run_one_scheme(cfg, *prob, s, dir, quiet));
        } catch (const TauAboveThresholdError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 3;
        }
    }
    return worst;
}

int cmd_compare(const std::string& config_path, const std::string& out_override,
                bool override_tau_guard, bool quiet) {
    RunConfig cfg;
    std::optional<Problem> prob;
    try {
        cfg = parse_config_file(config_path);
        if (override_tau_guard) cfg.override_tau_guard = true;
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (cfg.scheme != "both")
            throw ConfigError("compare needs discretization.scheme = both");
        if (cfg.reference.empty())
            throw ConfigError("compare needs compare.reference");
        if (cfg.compare_taus.size() < 3)
            throw ConfigError("compare needs at least three compare.taus");
        check_reference_compat(cfg);
        prob = build_problem(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    struct Row {
        Scheme scheme;
        double tau, l1, w2e;
    };
    std::vector<Row> rows;
    double orders[2] = {0.0, 0.0};
    try {
        for (Scheme s : {Scheme::jko, Scheme::bdf2}) {
            std::vector<double> errs;
            for (double tau : cfg.compare_taus) {
                StepperConfig scfg = make_stepper(cfg, *prob, tau);
                Trajectory traj =
                    run(prob->initial, cfg.t_final, s, prob->spec, scfg,
                        initializer_from_name(cfg.initializer));
                const QuantileMeasure& terminal = traj.state(traj.last_index());
                Snapshot snap =
                    reference_at(cfg, traj.time_of(traj.last_index()));
                double l1 = std::numeric_limits<double>::quiet_NaN();
                if (!snap.point_mass()) l1 = l1_error(terminal, snap);
                double w2e = w2_error(terminal, snap);
                rows.push_back({s, tau, l1, w2e});
                errs.push_back(w2e);
            }
            orders[s == Scheme::bdf2] = empirical_order(cfg.compare_taus, errs);
        }
    } catch (const TauAboveThresholdError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    fs::path dir = cfg.out_dir;
    try {
        fs::create_directories(dir);
        std::ostringstream csv;
        csv << "scheme,tau,l1_error,w2_error,order\n";
        for (const Row& r : rows)
            csv << scheme_name(r.scheme) << ',' << format_double(r.tau) << ','
                << format_double(r.l1) << ',' << format_double(r.w2e) << ','
                << format_double(orders[r.scheme == Scheme::bdf2]) << '\n';
        write_text(dir / "compare.csv", csv.str());

        ordered_json manifest;
        manifest["command"] = "compare";
        manifest["config"] = config_echo(cfg);
        ordered_json derived;
        derived["reference"] = cfg.reference;
        derived["order_jko"] = json_number(orders[0]);
        derived["order_bdf2"] = json_number(orders[1]);
        manifest["derived"] = std::move(derived);
        ordered_json table = ordered_json::array();
        for (const Row& r : rows) {
            ordered_json j;
            j["scheme"] = scheme_name(r.scheme);
            j["tau"] = json_number(r.tau);
            j["l1_error"] = json_number(r.l1);
            j["w2_error"] = json_number(r.w2e);
            table.push_back(std::move(j));
        }
        manifest["table"] = std::move(table);
        manifest["files"] = {{"table", "compare.csv"}};
        write_text(dir / "compare-manifest.json", manifest.dump(2) + "\n");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    if (!quiet)
        std::cout << "compare: order jko = " << format_double(orders[0])
                  << ", bdf2 = " << format_double(orders[1]) << ", table in "
                  << dir.string() << "\n";
    return 0;
}

int cmd_diagnose(const std::string& artifact_dir, bool quiet) {
    fs::path dir = artifact_dir;
    RunConfig cfg;
    std::optional<Problem> prob;
    Trajectory traj;
    double t_cover = 0.0;
    try {
        std::ifstream in(dir / "manifest.json", std::ios::binary);
        if (!in) throw Error("cannot read '" + (dir / "manifest.json").string() + "'");
        ordered_json manifest;
        try {
            in >> manifest;
        } catch (const std::exception& e) {
            throw Error(std::string("manifest is not valid: ") + e.what());
        }
        if (!manifest.contains("config") || !manifest["config"].is_object())
            throw Error("manifest lacks the config echo");
        std::string text;
        for (const auto& [key, value] : manifest["config"].items())
            text += key + " = " + value.get<std::string>() + "\n";
        cfg = parse_config_text(text);
        std::string scheme_str = cfg.scheme;
        if (manifest.contains("derived") &&
            manifest["derived"].contains("scheme"))
            scheme_str = manifest["derived"]["scheme"].get<std::string>();
        Scheme scheme = scheme_from_name(scheme_str);
        prob = build_problem(cfg);

        bool json = cfg.format == "json";
        std::string states_name = json ? "states.json" : "states.csv";
        if (manifest.contains("files") && manifest["files"].contains("states"))
            states_name = manifest["files"]["states"].get<std::string>();
        std::vector<StateRow> rows =
            read_states((dir / states_name).string(), json);

        int k_lo = scheme == Scheme::bdf2 ? -1 : 0;
        if (rows.front().k != k_lo)
            throw Error("states file does not start at the scheme's first index");
        traj.scheme = scheme;
        traj.initializer = initializer_from_name(cfg.initializer);
        traj.tau = cfg.tau;
        for (StateRow& row : rows) {
            if (row.positions.size() != cfg.n)
                throw Error("states grid size disagrees with the config");
            QuantileMeasure mu = from_quantiles(std::move(row.positions), cfg.domain);
            double f;
            try {
                f = total(mu, prob->spec);
            } catch (const SingularMeasureError&) {
                f = std::numeric_limits<double>::infinity();
            }
            traj.states.push_back(std::move(mu));
            traj.times.push_back(row.time);
            traj.energies.push_back(f);
            if (row.time < t_cover)
                throw Error("time stamps must be non-decreasing");
            t_cover = row.time;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    BatteryOptions opt;
    opt.toggles = DiagnosticsToggles{true, true, true, true, true, true};
    opt.grad_tol = cfg.grad_tol;
    opt.t_final = cfg.t_final;
    DiagnosticsReport rep = run_battery(traj, prob->spec, opt);
    write_text(dir / "diagnose-report.json", report_json(rep).dump(2) + "\n");

    int failures = 0;
    for (const CheckEntry& e : rep.entries) {
        if (e.asserted && !e.passed) {
            ++failures;
            std::cerr << "failed: " << e.name << " at k = "
                      << format_double(e.location)
                      << " with margin " << format_double(e.margin)
                      << " (tolerance " << format_double(e.tolerance) << ")\n";
        }
    }
    if (!quiet)
        std::cout << "diagnose: " << rep.entries.size() << " entries, "
                  << failures << " failed, report in "
                  << (dir / "diagnose-report.json").string() << "\n";
    return failures == 0 ? 0 : 4;
}

} // namespace wgf
