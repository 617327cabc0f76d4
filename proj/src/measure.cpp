#include "wgf/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wgf {

Domain Domain::interval(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw NonFiniteError("domain endpoints must be finite");
    if (!(lo < hi))
        throw DegenerateInputError("domain interval must have positive length");
    Domain d;
    d.bounded = true;
    d.lo = lo;
    d.hi = hi;
    return d;
}

bool QuantileMeasure::has_atom() const {
    for (std::size_t i = 0; i + 1 < x_.size(); ++i)
        if (x_[i + 1] == x_[i]) return true;
    return false;
}

double PiecewiseDensity::integral() const {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        total += values[i] * (breaks[i + 1] - breaks[i]);
    return total;
}

QuantileMeasure from_quantiles(std::vector<double> positions, const Domain& dom) {
    if (positions.size() < 2)
        throw DegenerateInputError("need at least two quantile positions");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!std::isfinite(positions[i]))
            throw NonFiniteError("quantile position is not finite");
        if (!dom.contains(positions[i])) {
            std::ostringstream msg;
            msg << "position " << positions[i] << " at node " << i
                << " outside domain [" << dom.lo << ", " << dom.hi << "]";
            throw OutOfDomainError(msg.str());
        }
        if (i > 0 && positions[i] < positions[i - 1])
            throw NonMonotoneError("quantile positions must be non-decreasing");
    }
    return QuantileMeasure(std::move(positions), dom);
}

namespace {

// Cumulative trapezoidal integral of the density on a uniform grid over the
// window; panel count is even so the window midpoint is a node.
struct NumericCdf {
    std::vector<double> x, f;
    double mass;
};

NumericCdf integrate_cdf(const std::function<double(double)>& density,
                         double lo, double hi, std::size_t n) {
    std::size_t panels = std::max<std::size_t>(4096, 16 * n);
    if (panels % 2) ++panels;
    NumericCdf cdf;
    cdf.x.resize(panels + 1);
    cdf.f.resize(panels + 1);
    double h = (hi - lo) / double(panels);
    double prev = density(lo);
    if (!std::isfinite(prev)) throw NonFiniteError("density not finite at window edge");
    if (prev < -1e-12) throw NegativeDensityError("density is negative");
    cdf.x[0] = lo;
    cdf.f[0] = 0.0;
    for (std::size_t k = 1; k <= panels; ++k) {
        double xk = lo + double(k) * h;
        if (k == panels) xk = hi;
        double v = density(xk);
        if (!std::isfinite(v)) throw NonFiniteError("density not finite inside window");
        if (v < -1e-12) throw NegativeDensityError("density is negative");
        v = std::max(v, 0.0);
        prev = std::max(prev, 0.0);
        cdf.x[k] = xk;
        cdf.f[k] = cdf.f[k - 1] + 0.5 * h * (prev + v);
        prev = v;
    }
    cdf.mass = cdf.f[panels];
    return cdf;
}

// Leftmost x with F(x) >= s on the piecewise-linear CDF.
double invert_cdf(const NumericCdf& cdf, double s) {
    const auto& x = cdf.x;
    const auto& f = cdf.f;
    if (s <= 0.0) {
        // left edge of support: last node before F becomes positive
        for (std::size_t k = 1; k < f.size(); ++k)
            if (f[k] > 0.0) return x[k - 1];
        return x.front();
    }
    if (s >= f.back()) {
        // right edge of support: first node where F reaches full mass
        for (std::size_t k = f.size(); k-- > 0;)
            if (f[k] < f.back()) return x[std::min(k + 1, f.size() - 1)];
        return x.back();
    }
    auto it = std::lower_bound(f.begin(), f.end(), s);
    std::size_t k = std::size_t(it - f.begin());
    double f0 = f[k - 1], f1 = f[k];
    if (f1 == f0) return x[k - 1];
    double t = (s - f0) / (f1 - f0);
    return x[k - 1] + t * (x[k] - x[k - 1]);
}

} // namespace

QuantileMeasure from_density(const std::function<double(double)>& density,
                             const Domain& dom, std::size_t n,
                             std::optional<std::pair<double, double>> window) {
    if (n < 2) throw DegenerateInputError("need at least two quantile nodes");
    double lo, hi;
    if (window) {
        lo = window->first;
        hi = window->second;
        if (!(lo < hi)) throw DegenerateInputError("window must have positive length");
        if (dom.bounded) {
            lo = std::max(lo, dom.lo);
            hi = std::min(hi, dom.hi);
        }
    } else if (dom.bounded) {
        lo = dom.lo;
        hi = dom.hi;
    } else {
        throw DegenerateInputError("unbounded domain requires a support window");
    }
    NumericCdf cdf = integrate_cdf(density, lo, hi, n);
    if (std::abs(cdf.mass - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "density mass on window is " << cdf.mass << ", expected 1";
        throw MassNotOneError(msg.str());
    }
    std::vector<double> pos(n);
    double d = 1.0 / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double s = (i + 1 == n) ? cdf.mass : double(i) * d * cdf.mass;
        pos[i] = invert_cdf(cdf, (i == 0) ? 0.0 : s);
    }
    pos.back() = invert_cdf(cdf, cdf.mass);
    for (std::size_t i = 1; i < n; ++i)
        if (pos[i] < pos[i - 1]) pos[i] = pos[i - 1];
    return from_quantiles(std::move(pos), dom);
}

double second_moment(const QuantileMeasure& mu) {
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double x = mu.position(i);
        total += mu.weight(i) * x * x;
    }
    return total;
}

PiecewiseDensity reconstruct_density(const QuantileMeasure& mu) {
    PiecewiseDensity pd;
    pd.breaks = mu.positions();
    pd.values.resize(mu.size() - 1);
    double d = mu.delta();
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
        double gap = pd.breaks[i + 1] - pd.breaks[i];
        if (gap <= 0.0)
            throw ZeroGapError("cell width is zero; measure has an atom");
        pd.values[i] = d / gap;
    }
    return pd;
}

} // namespace wgf
