#ifndef WGF_CONFIG_HPP
#define WGF_CONFIG_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wgf/energy.hpp"
#include "wgf/measure.hpp"
#include "wgf/stepper.hpp"

namespace wgf {

struct DiagnosticsToggles {
    bool dissipation = true;
    bool inequalities = true;
    bool classical = true;
    bool bv = true;
    bool el_residual = false;
    bool weak_form = false;
};

/// Parsed and validated run description.  raw keeps the key/value pairs in
/// file order for the manifest echo.
struct RunConfig {
    std::optional<double> m;
    std::string potential = "zero";
    double potential_scale = 1.0;
    std::string interaction = "zero";
    double interaction_scale = 1.0;
    std::string initial = "gaussian";
    std::vector<double> initial_params = {0.0, 1.0};
    Domain domain = Domain::line();

    std::size_t n = 100;
    double tau = 1e-3;
    double t_final = 0.1;
    std::string scheme = "bdf2";
    std::string initializer = "duplicate";

    double grad_tol = 1e-9;
    int max_iters = 500;
    double min_gap = 1e-12;
    std::optional<double> d2;
    bool override_tau_guard = false;

    DiagnosticsToggles diagnostics;

    std::string out_dir = "out";
    std::string format = "csv";

    std::vector<double> compare_taus;
    std::string reference;

    std::vector<std::pair<std::string, std::string>> raw;
};

/// Parses `key.path = value` lines (# comments, blank lines allowed) and
/// validates every field; unknown keys are rejected.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Ready-to-run problem data derived from a config.
struct Problem {
    EnergySpec spec;
    QuantileMeasure initial;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
    double tau_star = 0.0;
};

/// Builds the energy, the discretized initial measure and the growth
/// constants; audits catalog potentials on the working window.
Problem build_problem(const RunConfig& cfg);

/// Stepper settings for the problem at the given step size.
StepperConfig make_stepper(const RunConfig& cfg, const Problem& prob, double tau);

Scheme scheme_from_name(const std::string& name);
Initializer initializer_from_name(const std::string& name);
const char* scheme_name(Scheme s);
const char* initializer_name(Initializer i);

} // namespace wgf

#endif
