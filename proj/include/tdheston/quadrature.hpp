#pragma once

#include <Eigen/Dense>

namespace tdheston {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;
};

/// Rule of the given order (>= 1). Rules are computed once and cached;
/// the returned reference stays valid for the lifetime of the program.
const GaussLegendreRule& gauss_legendre(int order);

/// Integral of f over [lo, hi] with a single application of the rule.
template <typename Real, typename F>
Real integrate_panel(const GaussLegendreRule& rule, F&& f, double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    Real sum{};
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
        sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    return half * sum;
}

}  // namespace tdheston
