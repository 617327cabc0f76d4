#include "wgf/transport.hpp"

#include <cmath>

namespace wgf {

namespace {

void require_same_grid(const QuantileMeasure& a, const QuantileMeasure& b) {
    if (a.size() != b.size())
        throw GridMismatchError("measures live on different grid sizes");
}

double w2_squared(const QuantileMeasure& mu, const QuantileMeasure& nu) {
    require_same_grid(mu, nu);
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double dx = mu.position(i) - nu.position(i);
        total += mu.weight(i) * dx * dx;
    }
    return total;
}

} // namespace

double w2(const QuantileMeasure& mu, const QuantileMeasure& nu) {
    return std::sqrt(w2_squared(mu, nu));
}

MonotonePlan monotone_plan(const QuantileMeasure& mu, const QuantileMeasure& nu) {
    require_same_grid(mu, nu);
    MonotonePlan plan;
    plan.pairs.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        plan.pairs.emplace_back(mu.position(i), nu.position(i));
    plan.cost = w2_squared(mu, nu);
    return plan;
}

double check_triangle_binomial(const QuantileMeasure& eta,
                               const QuantileMeasure& nu,
                               const QuantileMeasure& rho) {
    return 2.0 * w2_squared(eta, nu) + 2.0 * w2_squared(nu, rho)
         - w2_squared(eta, rho);
}

std::pair<double, double> check_moment_distance_bound(const QuantileMeasure& rho,
                                                      const QuantileMeasure& nu) {
    double d2 = 2.0 * w2_squared(rho, nu);
    double lower = d2 - (second_moment(rho) - 2.0 * second_moment(nu));
    double upper = 3.0 * second_moment(rho) + 6.0 * second_moment(nu) - d2;
    return {lower, upper};
}

} // namespace wgf
