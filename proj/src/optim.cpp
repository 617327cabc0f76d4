#include "wgf/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace wgf {

namespace {

double sup_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct Pair {
    std::vector<double> s, y;
    double rho; // 1 / (s.y)
};

// Two-loop recursion: direction = -H g.
void apply_inverse_hessian(const std::deque<Pair>& mem,
                           const std::vector<double>& g,
                           std::vector<double>& d) {
    d.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
    if (mem.empty()) return;
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
        alpha[k] = mem[k].rho * dot(mem[k].s, d);
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] -= alpha[k] * mem[k].y[i];
    }
    const Pair& last = mem.back();
    double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : d) v *= gamma;
    for (std::size_t k = 0; k < mem.size(); ++k) {
        double beta = mem[k].rho * dot(mem[k].y, d);
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += (alpha[k] - beta) * mem[k].s[i];
    }
}

} // namespace

OptimResult lbfgs_minimize(const Objective& f, std::vector<double> x0,
                           const OptimOptions& opts) {
    const std::size_t n = x0.size();
    OptimResult res;
    res.x = opts.project ? opts.project(std::move(x0)) : std::move(x0);
    std::vector<double> g(n), d(n), xt(n), gt(n);
    res.value = f(res.x, g);
    res.grad_sup = sup_norm(g);
    std::deque<Pair> mem;

    auto converged = [&](double value, double gsup) {
        return std::isfinite(value) &&
               gsup <= opts.grad_tol * (1.0 + std::abs(value));
    };

    // Near the minimum the attainable decrease per step drops below the
    // floating-point resolution of the objective while the gradient is still
    // informative, so the search accepts steps inside a small value band when
    // the directional derivative or the gradient sup norm improves.
    auto line_search = [&](const std::vector<double>& dir, double slope,
                           double t, double& ft) {
        const double band =
            64.0 * std::numeric_limits<double>::epsilon() *
            (1.0 + std::abs(res.value));
        for (int back = 0; back < 40; ++back) {
            for (std::size_t i = 0; i < n; ++i)
                xt[i] = res.x[i] + t * dir[i];
            if (opts.project) xt = opts.project(std::move(xt));
            ft = f(xt, gt);
            if (std::isfinite(ft)) {
                if (ft <= res.value + 1e-4 * t * slope && ft < res.value)
                    return true;
                if (ft <= res.value + band &&
                    (dot(gt, dir) >= 0.9 * slope ||
                     sup_norm(gt) <= 0.98 * res.grad_sup))
                    return true;
            }
            t *= 0.5;
        }
        return false;
    };

    bool fell_back = false;
    while (res.iterations < opts.max_iters) {
        if (converged(res.value, res.grad_sup)) {
            res.converged = true;
            return res;
        }
        apply_inverse_hessian(mem, g, d);
        double slope = dot(g, d);
        if (!(slope < 0.0)) {
            mem.clear();
            for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
            slope = -dot(g, g);
        }
        double t0 = res.iterations == 0 && !fell_back
                        ? std::min(1.0, 1.0 / std::max(1.0, res.grad_sup))
                        : 1.0;
        double ft = 0.0;
        bool accepted = line_search(d, slope, t0, ft);
        if (!accepted) {
            if (!mem.empty() || !fell_back) {
                // retry once from scratch along -g
                mem.clear();
                fell_back = true;
                for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
                slope = -dot(g, g);
                accepted = line_search(
                    d, slope, 1.0 / std::max(1.0, res.grad_sup), ft);
            }
            if (!accepted) break; // no progress possible at this precision
        }
        Pair pr;
        pr.s.resize(n);
        pr.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pr.s[i] = xt[i] - res.x[i];
            pr.y[i] = gt[i] - g[i];
        }
        double sy = dot(pr.s, pr.y);
        double sn = std::sqrt(dot(pr.s, pr.s)), yn = std::sqrt(dot(pr.y, pr.y));
        if (sy > 1e-12 * sn * yn && std::isfinite(sy)) {
            pr.rho = 1.0 / sy;
            mem.push_back(std::move(pr));
            if (int(mem.size()) > opts.memory) mem.pop_front();
        }
        res.x.swap(xt);
        g.swap(gt);
        res.value = ft;
        res.grad_sup = sup_norm(g);
        ++res.iterations;
    }
    res.converged = converged(res.value, res.grad_sup);
    return res;
}

} // namespace wgf
