#include "wgf/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "wgf/diagnostics.hpp"
#include "wgf/reference.hpp"

namespace wgf {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

double parse_number(const std::string& key, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    double x = std::strtod(begin, &end);
    if (end != begin + v.size() || v.empty() || !std::isfinite(x))
        bad(key, "expected a finite number, got '" + v + "'");
    return x;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) out.push_back(parse_number(key, tok));
    if (out.empty()) bad(key, "expected at least one number");
    return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    double x = parse_number(key, v);
    if (x < 0.0 || x != std::floor(x) || x > 1e9)
        bad(key, "expected a non-negative integer");
    return std::size_t(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad(key, "expected true or false, got '" + v + "'");
}

const std::set<std::string>& potential_names() {
    static const std::set<std::string> names = {"zero", "quadratic",
                                                "double_well", "gaussian_kernel"};
    return names;
}

const std::set<std::string>& initial_names() {
    static const std::set<std::string> names = {"uniform", "gaussian",
                                                "barenblatt", "bump", "point"};
    return names;
}

const std::set<std::string>& reference_names() {
    static const std::set<std::string> names = {
        "gaussian_heat", "ornstein_uhlenbeck", "barenblatt_m2", "ou_particle"};
    return names;
}

struct DomainDraft {
    std::string kind = "line";
    std::optional<double> lo, hi;
};

void apply(RunConfig& cfg, DomainDraft& dom, const std::string& key,
           const std::string& value) {
    if (key == "problem.m") cfg.m = parse_number(key, value);
    else if (key == "problem.potential") cfg.potential = value;
    else if (key == "problem.potential_scale") cfg.potential_scale = parse_number(key, value);
    else if (key == "problem.interaction") cfg.interaction = value;
    else if (key == "problem.interaction_scale") cfg.interaction_scale = parse_number(key, value);
    else if (key == "problem.initial") cfg.initial = value;
    else if (key == "problem.initial_params") cfg.initial_params = parse_numbers(key, value);
    else if (key == "problem.domain") dom.kind = value;
    else if (key == "problem.domain_lo") dom.lo = parse_number(key, value);
    else if (key == "problem.domain_hi") dom.hi = parse_number(key, value);
    else if (key == "discretization.n") cfg.n = parse_count(key, value);
    else if (key == "discretization.tau") cfg.tau = parse_number(key, value);
    else if (key == "discretization.t_final") cfg.t_final = parse_number(key, value);
    else if (key == "discretization.scheme") cfg.scheme = value;
    else if (key == "discretization.initializer") cfg.initializer = value;
    else if (key == "optimizer.grad_tol") cfg.grad_tol = parse_number(key, value);
    else if (key == "optimizer.max_iters") cfg.max_iters = int(parse_count(key, value));
    else if (key == "optimizer.min_gap") cfg.min_gap = parse_number(key, value);
    else if (key == "optimizer.d2") cfg.d2 = parse_number(key, value);
    else if (key == "optimizer.override_tau_guard") cfg.override_tau_guard = parse_bool(key, value);
    else if (key == "diagnostics.dissipation") cfg.diagnostics.dissipation = parse_bool(key, value);
    else if (key == "diagnostics.inequalities") cfg.diagnostics.inequalities = parse_bool(key, value);
    else if (key == "diagnostics.classical") cfg.diagnostics.classical = parse_bool(key, value);
    else if (key == "diagnostics.bv") cfg.diagnostics.bv = parse_bool(key, value);
    else if (key == "diagnostics.el_residual") cfg.diagnostics.el_residual = parse_bool(key, value);
    else if (key == "diagnostics.weak_form") cfg.diagnostics.weak_form = parse_bool(key, value);
    else if (key == "output.dir") cfg.out_dir = value;
    else if (key == "output.format") cfg.format = value;
    else if (key == "compare.taus") cfg.compare_taus = parse_numbers(key, value);
    else if (key == "compare.reference") cfg.reference = value;
    else bad(key, "unknown key");
}

void check_initial_arity(const RunConfig& cfg) {
    const std::string key = "problem.initial_params";
    const std::vector<double>& p = cfg.initial_params;
    if (cfg.initial == "uniform") {
        if (p.size() != 2) bad(key, "uniform takes (lo, hi)");
        if (!(p[0] < p[1])) bad(key, "uniform needs lo < hi");
    } else if (cfg.initial == "gaussian") {
        if (p.size() != 2) bad(key, "gaussian takes (mean, var)");
        if (!(p[1] > 0.0)) bad(key, "gaussian needs a positive variance");
    } else if (cfg.initial == "barenblatt") {
        if (p.size() != 1) bad(key, "barenblatt takes (t0)");
        if (!(p[0] > 0.0)) bad(key, "barenblatt needs t0 > 0");
    } else if (cfg.initial == "bump") {
        if (p.size() != 2) bad(key, "bump takes (center, halfwidth)");
        if (!(p[1] > 0.0)) bad(key, "bump needs a positive halfwidth");
    } else if (cfg.initial == "point") {
        if (p.size() != 1) bad(key, "point takes (x0)");
    }
}

void check_support_inside(const RunConfig& cfg) {
    if (!cfg.domain.bounded) return;
    const std::vector<double>& p = cfg.initial_params;
    double lo = 0.0, hi = 0.0;
    if (cfg.initial == "uniform") lo = p[0], hi = p[1];
    else if (cfg.initial == "bump") lo = p[0] - p[1], hi = p[0] + p[1];
    else if (cfg.initial == "point") lo = hi = p[0];
    else return; // gaussian / barenblatt tails are clamped by discretization
    if (!cfg.domain.contains(lo) || !cfg.domain.contains(hi))
        bad("problem.initial_params", "initial support leaves the domain");
}

void validate(RunConfig& cfg, const DomainDraft& dom) {
    if (dom.kind == "line") {
        cfg.domain = Domain::line();
    } else if (dom.kind == "interval") {
        if (!dom.lo || !dom.hi)
            bad("problem.domain", "interval needs problem.domain_lo and problem.domain_hi");
        if (!(*dom.lo < *dom.hi))
            bad("problem.domain_lo", "interval needs lo < hi");
        cfg.domain = Domain::interval(*dom.lo, *dom.hi);
    } else {
        bad("problem.domain", "expected line or interval");
    }
    if (cfg.m && !(*cfg.m >= 1.0)) bad("problem.m", "needs m >= 1");
    if (!potential_names().count(cfg.potential))
        bad("problem.potential", "unknown catalog name '" + cfg.potential + "'");
    if (!potential_names().count(cfg.interaction))
        bad("problem.interaction", "unknown catalog name '" + cfg.interaction + "'");
    if (!std::isfinite(cfg.potential_scale)) bad("problem.potential_scale", "not finite");
    if (!std::isfinite(cfg.interaction_scale)) bad("problem.interaction_scale", "not finite");
    if (!initial_names().count(cfg.initial))
        bad("problem.initial", "unknown catalog name '" + cfg.initial + "'");
    check_initial_arity(cfg);
    check_support_inside(cfg);
    if (cfg.n < 2) bad("discretization.n", "needs at least two nodes");
    if (!(cfg.tau > 0.0)) bad("discretization.tau", "needs tau > 0");
    if (!(cfg.t_final > 0.0)) bad("discretization.t_final", "needs t_final > 0");
    if (cfg.scheme != "jko" && cfg.scheme != "bdf2" && cfg.scheme != "both")
        bad("discretization.scheme", "expected jko, bdf2 or both");
    if (cfg.initializer != "duplicate" && cfg.initializer != "jko-substep")
        bad("discretization.initializer", "expected duplicate or jko-substep");
    if (!(cfg.grad_tol > 0.0)) bad("optimizer.grad_tol", "needs grad_tol > 0");
    if (cfg.max_iters < 1) bad("optimizer.max_iters", "needs at least one iteration");
    if (!(cfg.min_gap > 0.0)) bad("optimizer.min_gap", "needs min_gap > 0");
    if (cfg.d2 && !(*cfg.d2 >= 0.0)) bad("optimizer.d2", "needs d2 >= 0");
    if (cfg.format != "csv" && cfg.format != "json")
        bad("output.format", "expected csv or json");
    if (cfg.out_dir.empty()) bad("output.dir", "must not be empty");
    for (std::size_t i = 0; i < cfg.compare_taus.size(); ++i) {
        if (!(cfg.compare_taus[i] > 0.0)) bad("compare.taus", "steps must be positive");
        if (i > 0 && !(cfg.compare_taus[i] < cfg.compare_taus[i - 1]))
            bad("compare.taus", "steps must be strictly decreasing");
    }
    if (!cfg.reference.empty() && !reference_names().count(cfg.reference))
        bad("compare.reference", "unknown reference '" + cfg.reference + "'");
}

QuantileMeasure build_initial(const RunConfig& cfg) {
    const std::vector<double>& p = cfg.initial_params;
    if (cfg.initial == "uniform") {
        std::vector<double> pos(cfg.n);
        double d = 1.0 / double(cfg.n - 1);
        for (std::size_t i = 0; i < cfg.n; ++i)
            pos[i] = p[0] + double(i) * d * (p[1] - p[0]);
        return from_quantiles(std::move(pos), cfg.domain);
    }
    if (cfg.initial == "gaussian")
        return discretize(gaussian_heat(0.0, p[0], p[1]), cfg.n, cfg.domain);
    if (cfg.initial == "barenblatt")
        return discretize(barenblatt_m2(p[0]), cfg.n, cfg.domain);
    if (cfg.initial == "bump") {
        double c = p[0], h = p[1];
        static const double norm = [] {
            // Simpson over [-1, 1]
            const std::size_t panels = 4096;
            double acc = 0.0, step = 2.0 / double(panels);
            for (std::size_t i = 0; i < panels; ++i) {
                double a = -1.0 + double(i) * step;
                acc += step / 6.0 *
                       (bump(a) + 4.0 * bump(a + 0.5 * step) + bump(a + step));
            }
            return acc;
        }();
        auto density = [c, h](double x) { return bump((x - c) / h) / (h * norm); };
        return from_density(density, cfg.domain, cfg.n,
                            std::make_pair(c - h, c + h));
    }
    // point
    return from_quantiles(std::vector<double>(cfg.n, p[0]), cfg.domain);
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    DomainDraft dom;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        apply(cfg, dom, key, value);
        cfg.raw.emplace_back(key, value);
    }
    validate(cfg, dom);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Problem build_problem(const RunConfig& cfg) {
    EnergySpec spec;
    spec.m = cfg.m;
    QuantileMeasure initial = build_initial(cfg);
    double span = std::max(std::abs(initial.positions().front()),
                           std::abs(initial.positions().back()));
    double audit_hw = std::max(3.0, 2.0 * span + 1.0);
    if (cfg.potential != "zero")
        spec.external = catalog_potential(cfg.potential, cfg.potential_scale, audit_hw);
    if (cfg.interaction != "zero")
        spec.interaction =
            catalog_potential(cfg.interaction, cfg.interaction_scale, 2.0 * audit_hw);
    spec.validate();
    double d1 = std::max(spec.external ? spec.external->growth_constant : 0.0,
                         spec.interaction ? spec.interaction->growth_constant : 0.0);
    double d2 = cfg.d2.value_or(spec.has_internal() ? 1.0 : 0.0);
    double d4 = 0.0;
    if (spec.has_internal())
        d4 = initial.has_atom() ? std::numeric_limits<double>::infinity()
                                : internal(initial, *spec.m);
    return {std::move(spec), std::move(initial), d1, d2, 0.0, d4,
            tau_threshold(d1, d2)};
}

StepperConfig make_stepper(const RunConfig& cfg, const Problem& prob, double tau) {
    StepperConfig s;
    s.tau = tau;
    s.grad_tol = cfg.grad_tol;
    s.max_iters = cfg.max_iters;
    s.min_gap = cfg.min_gap;
    s.d1 = prob.d1;
    s.d2 = prob.d2;
    s.d3 = prob.d3;
    s.d4 = prob.d4;
    s.override_tau_guard = cfg.override_tau_guard;
    return s;
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "jko") return Scheme::jko;
    if (name == "bdf2") return Scheme::bdf2;
    throw ConfigError("unknown scheme '" + name + "'");
}

Initializer initializer_from_name(const std::string& name) {
    if (name == "duplicate") return Initializer::duplicate;
    if (name == "jko-substep") return Initializer::jko_substep;
    throw ConfigError("unknown initializer '" + name + "'");
}

const char* scheme_name(Scheme s) {
    return s == Scheme::jko ? "jko" : "bdf2";
}

const char* initializer_name(Initializer i) {
    return i == Initializer::duplicate ? "duplicate" : "jko-substep";
}

} // namespace wgf
