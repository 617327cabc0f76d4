#ifndef WGF_OPTIM_HPP
#define WGF_OPTIM_HPP

#include <functional>
#include <vector>

namespace wgf {

/// Evaluates the objective at x and fills grad (same length as x).
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct OptimOptions {
    double grad_tol = 1e-9; // relative: stop when sup|g| <= grad_tol (1 + |f|)
    int max_iters = 500;
    int memory = 10;
    // retraction applied to every trial point before evaluation; lets the
    // search slide along the boundary of a constraint cone instead of
    // rejecting every step that grazes it
    std::function<std::vector<double>(std::vector<double>)> project;
};

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    double grad_sup = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Limited-memory BFGS with Armijo backtracking.  Non-finite trial values are
/// rejected by the line search; stalls reset the memory and fall back to
/// steepest descent before giving up.
OptimResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const OptimOptions& opts);

} // namespace wgf

#endif
