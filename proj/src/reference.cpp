#include "wgf/reference.hpp"

#include <algorithm>
#include <cmath>

namespace wgf {

namespace {

// Endpoint quantile level factor for unbounded supports: the first and last
// nodes sit at levels 0.15 * delta and 1 - 0.15 * delta.  Calibrated so the
// trapezoidal second moment of a discretized standard Gaussian is exact to
// 2.7e-4 at N = 400 and 5.4e-5 at N = 2000.
constexpr double kTailLevel = 0.15;

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void require_time(double t, bool strictly_positive) {
    if (!std::isfinite(t) || t < 0.0 || (strictly_positive && t == 0.0))
        throw NonpositiveTimeError("time outside the admissible range");
}

double barenblatt_radius(double t) { return std::cbrt(9.0 * t); } // 3^(2/3) t^(1/3)

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DegenerateInputError("normal quantile needs a level in (0,1)");
    // rational approximation (Acklam), then one Halley refinement
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
          / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
          / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
          / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = normal_cdf(x) - p;
    double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double Snapshot::density(double x) const {
    switch (kind) {
    case SolutionKind::barenblatt_m2: {
        double s = std::pow(t, -1.0 / 3.0);
        double v = c_mass - x * x * std::pow(t, -2.0 / 3.0) / 12.0;
        return v > 0.0 ? s * v : 0.0;
    }
    case SolutionKind::ou_particle:
        throw SingularMeasureError("point mass has no density");
    default: {
        double sd = std::sqrt(var);
        return normal_pdf((x - mean) / sd) / sd;
    }
    }
}

double Snapshot::cdf(double x) const {
    switch (kind) {
    case SolutionKind::barenblatt_m2: {
        double r = barenblatt_radius(t);
        double xc = std::clamp(x, -r, r);
        double f = std::pow(t, -1.0 / 3.0)
                 * (c_mass * (xc + r)
                    - std::pow(t, -2.0 / 3.0) * (xc * xc * xc + r * r * r) / 36.0);
        return std::clamp(f, 0.0, 1.0);
    }
    case SolutionKind::ou_particle:
        return x < mean ? 0.0 : 1.0;
    default:
        return normal_cdf((x - mean) / std::sqrt(var));
    }
}

double Snapshot::quantile(double s) const {
    if (!(s >= 0.0 && s <= 1.0))
        throw DegenerateInputError("quantile level outside [0,1]");
    switch (kind) {
    case SolutionKind::barenblatt_m2: {
        double r = barenblatt_radius(t);
        if (s <= 0.0) return -r;
        if (s >= 1.0) return r;
        double lo = -r, hi = r;
        for (int k = 0; k < 64; ++k) {
            double mid = 0.5 * (lo + hi);
            (cdf(mid) < s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    case SolutionKind::ou_particle:
        return mean;
    default:
        if (s <= 0.0 || s >= 1.0)
            throw DegenerateInputError("unbounded support: level must be interior");
        return mean + std::sqrt(var) * normal_quantile(s);
    }
}

std::pair<double, double> Snapshot::support() const {
    switch (kind) {
    case SolutionKind::barenblatt_m2: {
        double r = barenblatt_radius(t);
        return {-r, r};
    }
    case SolutionKind::ou_particle:
        return {mean, mean};
    default: {
        double sd = std::sqrt(var);
        return {mean - 8.5 * sd, mean + 8.5 * sd};
    }
    }
}

Snapshot gaussian_heat(double t, double mean0, double var0) {
    require_time(t, false);
    if (!(var0 > 0.0)) throw DegenerateInputError("initial variance must be positive");
    Snapshot s;
    s.kind = SolutionKind::gaussian_heat;
    s.t = t;
    s.mean = mean0;
    s.var = var0 + 2.0 * t;
    return s;
}

Snapshot ornstein_uhlenbeck(double t, double mean0, double var0) {
    require_time(t, false);
    if (!(var0 > 0.0)) throw DegenerateInputError("initial variance must be positive");
    Snapshot s;
    s.kind = SolutionKind::ornstein_uhlenbeck;
    s.t = t;
    s.mean = mean0 * std::exp(-t);
    s.var = 1.0 + (var0 - 1.0) * std::exp(-2.0 * t);
    return s;
}

Snapshot barenblatt_m2(double t) {
    require_time(t, true);
    Snapshot s;
    s.kind = SolutionKind::barenblatt_m2;
    s.t = t;
    s.c_mass = std::cbrt(3.0) / 4.0; // unit mass
    return s;
}

Snapshot ou_particle(double t, double x0) {
    require_time(t, false);
    Snapshot s;
    s.kind = SolutionKind::ou_particle;
    s.t = t;
    s.mean = x0 * std::exp(-t);
    return s;
}

double w2_gaussians(double mean1, double var1, double mean2, double var2) {
    if (var1 < 0.0 || var2 < 0.0)
        throw DegenerateInputError("variances must be non-negative");
    double dm = mean1 - mean2;
    double ds = std::sqrt(var1) - std::sqrt(var2);
    return std::sqrt(dm * dm + ds * ds);
}

QuantileMeasure discretize(const Snapshot& snap, std::size_t n, const Domain& dom) {
    if (n < 2) throw DegenerateInputError("need at least two quantile nodes");
    std::vector<double> pos(n);
    double d = 1.0 / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double s = double(i) * d;
        if (!snap.bounded_support())
            s = std::clamp(s, kTailLevel * d, 1.0 - kTailLevel * d);
        pos[i] = snap.quantile(s);
    }
    if (dom.bounded)
        for (double& p : pos) p = std::clamp(p, dom.lo, dom.hi);
    return from_quantiles(std::move(pos), dom);
}

double l1_error(const QuantileMeasure& mu, const Snapshot& snap) {
    if (snap.point_mass())
        throw SingularMeasureError("L1 error undefined against a point mass");
    PiecewiseDensity pd = reconstruct_density(mu);
    // 5-point Gauss-Legendre on [0,1]
    static const double gx[] = {0.046910077030668, 0.230765344947158, 0.5,
                                0.769234655052841, 0.953089922969332};
    static const double gw[] = {0.118463442528095, 0.239314335249683,
                                0.284444444444444, 0.239314335249683,
                                0.118463442528095};
    double total = 0.0;
    for (std::size_t c = 0; c < pd.values.size(); ++c) {
        double a = pd.breaks[c], b = pd.breaks[c + 1];
        double v = pd.values[c];
        int sub = 4;
        double h = (b - a) / sub;
        for (int p = 0; p < sub; ++p) {
            double lo = a + p * h;
            for (int q = 0; q < 5; ++q)
                total += gw[q] * h * std::abs(v - snap.density(lo + gx[q] * h));
        }
    }
    total += snap.cdf(pd.breaks.front());
    total += 1.0 - snap.cdf(pd.breaks.back());
    return total;
}

double w2_error(const QuantileMeasure& mu, const Snapshot& snap) {
    QuantileMeasure target = discretize(snap, mu.size(), mu.domain());
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double dx = mu.position(i) - target.position(i);
        total += mu.weight(i) * dx * dx;
    }
    return std::sqrt(total);
}

double empirical_order(const std::vector<double>& taus,
                       const std::vector<double>& errors) {
    if (taus.size() != errors.size() || taus.size() < 3)
        throw DegenerateInputError("order fit needs at least three (tau, error) pairs");
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!(taus[i] > 0.0) || !std::isfinite(taus[i]))
            throw DegenerateInputError("step sizes must be positive");
        if (i > 0 && !(taus[i] < taus[i - 1]))
            throw DegenerateInputError("step sizes must be strictly decreasing");
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i]))
            throw DegenerateInputError("errors must be positive for a log-log fit");
    }
    double mt = 0.0, me = 0.0;
    const double n = double(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        mt += std::log(taus[i]);
        me += std::log(errors[i]);
    }
    mt /= n;
    me /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        double dt = std::log(taus[i]) - mt;
        num += dt * (std::log(errors[i]) - me);
        den += dt * dt;
    }
    return num / den;
}

} // namespace wgf
