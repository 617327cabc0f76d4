#ifndef WGF_MEASURE_HPP
#define WGF_MEASURE_HPP

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "wgf/errors.hpp"

namespace wgf {

/// Spatial domain: the whole line or a closed bounded interval [lo, hi].
struct Domain {
    bool bounded = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    static Domain line() { return {}; }
    static Domain interval(double lo, double hi);
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Probability measure on the line stored by its quantile function sampled at
/// the uniform levels s_i = (i-1)/(N-1).  Positions are non-decreasing; equal
/// adjacent positions represent an atom.
class QuantileMeasure {
public:
    std::size_t size() const { return x_.size(); }
    const std::vector<double>& positions() const { return x_; }
    double position(std::size_t i) const { return x_[i]; }
    const Domain& domain() const { return dom_; }

    /// Level spacing 1/(N-1).
    double delta() const { return 1.0 / double(x_.size() - 1); }
    /// Level of node i.
    double level(std::size_t i) const { return double(i) * delta(); }
    /// Trapezoidal level weight of node i (delta, halved at the ends).
    double weight(std::size_t i) const {
        double d = delta();
        return (i == 0 || i + 1 == x_.size()) ? 0.5 * d : d;
    }
    /// True if some cell has zero width.
    bool has_atom() const;

private:
    friend QuantileMeasure from_quantiles(std::vector<double>, const Domain&);
    QuantileMeasure(std::vector<double> x, Domain dom)
        : x_(std::move(x)), dom_(dom) {}
    std::vector<double> x_;
    Domain dom_;
};

/// Piecewise-constant density reconstructed from a quantile measure: value
/// values[i] on [breaks[i], breaks[i+1]).
struct PiecewiseDensity {
    std::vector<double> breaks;
    std::vector<double> values;
    double integral() const;
};

/// Validates positions (finite, non-decreasing, inside the domain) and wraps
/// them as a measure.
QuantileMeasure from_quantiles(std::vector<double> positions, const Domain& dom);

/// Discretizes a density by numerically integrating its CDF on a window and
/// inverting it at the uniform levels by bisection.  The window defaults to
/// the domain for bounded domains and must be supplied for the line.  The
/// density must carry unit mass on the window (checked to 1e-6).
QuantileMeasure from_density(const std::function<double(double)>& density,
                             const Domain& dom, std::size_t n,
                             std::optional<std::pair<double, double>> window = {});

/// Second moment by the trapezoidal level sum.
double second_moment(const QuantileMeasure& mu);

/// Cell densities delta/gap on the support; requires all gaps positive.
PiecewiseDensity reconstruct_density(const QuantileMeasure& mu);

} // namespace wgf

#endif
