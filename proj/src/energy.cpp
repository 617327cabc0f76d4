#include "wgf/energy.hpp"

#include <cmath>

namespace wgf {

double EnergySpec::growth_bound() const {
    double d1 = 0.0;
    if (external) d1 = std::max(d1, external->growth_constant);
    if (interaction) d1 = std::max(d1, interaction->growth_constant);
    return d1;
}

void EnergySpec::validate() const {
    if (m && (!std::isfinite(*m) || *m < 1.0))
        throw DegenerateInputError("internal-energy exponent must satisfy m >= 1");
    if (interaction && !interaction->symmetric)
        throw AsymmetricKernelError("interaction kernel must be symmetric");
}

double internal(const QuantileMeasure& mu, double m) {
    if (!std::isfinite(m) || m < 1.0)
        throw DegenerateInputError("internal-energy exponent must satisfy m >= 1");
    double d = mu.delta();
    double total = 0.0;
    if (m == 1.0) {
        for (std::size_t j = 0; j + 1 < mu.size(); ++j) {
            double gap = mu.position(j + 1) - mu.position(j);
            if (gap <= 0.0)
                throw SingularMeasureError("internal energy undefined on atoms");
            total += d * std::log(d / gap);
        }
    } else {
        double dm = std::pow(d, m);
        for (std::size_t j = 0; j + 1 < mu.size(); ++j) {
            double gap = mu.position(j + 1) - mu.position(j);
            if (gap <= 0.0)
                throw SingularMeasureError("internal energy undefined on atoms");
            total += dm * std::pow(gap, 1.0 - m);
        }
        total /= (m - 1.0);
    }
    return total;
}

double external(const QuantileMeasure& mu, const PotentialHandle& v) {
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        total += mu.weight(i) * v.value(mu.position(i));
    return total;
}

double interaction(const QuantileMeasure& mu, const PotentialHandle& w) {
    const std::size_t n = mu.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            acc += mu.weight(j) * w.value(mu.position(i) - mu.position(j));
        total += mu.weight(i) * acc;
    }
    return 0.5 * total;
}

double total(const QuantileMeasure& mu, const EnergySpec& spec) {
    double f = 0.0;
    if (spec.m) f += internal(mu, *spec.m);
    if (spec.external) f += external(mu, *spec.external);
    if (spec.interaction) f += interaction(mu, *spec.interaction);
    return f;
}

std::vector<double> gradient_total(const QuantileMeasure& mu, const EnergySpec& spec) {
    const std::size_t n = mu.size();
    std::vector<double> grad(n, 0.0);
    const auto& x = mu.positions();
    if (spec.m) {
        double m = *spec.m;
        double d = mu.delta();
        if (m == 1.0) {
            for (std::size_t j = 0; j + 1 < n; ++j) {
                double gap = x[j + 1] - x[j];
                if (gap <= 0.0)
                    throw SingularMeasureError("internal energy undefined on atoms");
                double t = d / gap;
                grad[j] += t;
                grad[j + 1] -= t;
            }
        } else {
            double dm = std::pow(d, m);
            for (std::size_t j = 0; j + 1 < n; ++j) {
                double gap = x[j + 1] - x[j];
                if (gap <= 0.0)
                    throw SingularMeasureError("internal energy undefined on atoms");
                double t = dm * std::pow(gap, -m);
                grad[j] += t;
                grad[j + 1] -= t;
            }
        }
    }
    if (spec.external) {
        for (std::size_t i = 0; i < n; ++i)
            grad[i] += mu.weight(i) * spec.external->deriv(x[i]);
    }
    if (spec.interaction) {
        const auto& w = *spec.interaction;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                acc += mu.weight(j) * w.deriv(x[i] - x[j]);
            grad[i] += mu.weight(i) * acc;
        }
    }
    return grad;
}

double carleman_floor(const QuantileMeasure& mu, double m, double d2) {
    return internal(mu, m) + d2 * (1.0 + second_moment(mu));
}

double audit_growth(const PotentialHandle& p, double lo, double hi,
                    std::size_t samples) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        double x = lo + (hi - lo) * double(k) / double(samples - 1);
        double cap = p.growth_constant * (1.0 + x * x);
        worst = std::max(worst, std::abs(p.value(x)) - cap);
        worst = std::max(worst, std::abs(p.deriv(x)) - cap);
    }
    return worst;
}

double audit_symmetry(const PotentialHandle& p, double lo, double hi,
                      std::size_t samples) {
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        double x = lo + (hi - lo) * double(k) / double(samples - 1);
        worst = std::max(worst, std::abs(p.value(x) - p.value(-x)));
    }
    return worst;
}

PotentialHandle catalog_potential(const std::string& name, double scale,
                                  double audit_halfwidth) {
    if (!std::isfinite(scale))
        throw NonFiniteError("potential scale must be finite");
    PotentialHandle p;
    p.name = name;
    p.symmetric = true;
    if (name == "zero") {
        p.value = [](double) { return 0.0; };
        p.deriv = [](double) { return 0.0; };
        p.growth_constant = 0.0;
    } else if (name == "quadratic") {
        p.value = [scale](double x) { return 0.5 * scale * x * x; };
        p.deriv = [scale](double x) { return scale * x; };
        p.growth_constant = 0.5 * std::abs(scale);
    } else if (name == "double_well") {
        p.value = [scale](double x) {
            double q = x * x - 1.0;
            return 0.25 * scale * q * q;
        };
        p.deriv = [scale](double x) { return scale * x * (x * x - 1.0); };
        // quartic growth: constant only valid on the audited window
        double a = std::abs(audit_halfwidth);
        double worst = 0.0;
        for (int k = 0; k <= 1000; ++k) {
            double x = -a + 2.0 * a * double(k) / 1000.0;
            double cap = 1.0 + x * x;
            worst = std::max(worst, std::abs(p.value(x)) / cap);
            worst = std::max(worst, std::abs(p.deriv(x)) / cap);
        }
        p.growth_constant = worst;
    } else if (name == "gaussian_kernel") {
        p.value = [scale](double x) { return scale * std::exp(-0.5 * x * x); };
        p.deriv = [scale](double x) { return -scale * x * std::exp(-0.5 * x * x); };
        p.growth_constant = std::abs(scale);
    } else {
        throw DegenerateInputError("unknown potential '" + name + "'");
    }
    return p;
}

} // namespace wgf
