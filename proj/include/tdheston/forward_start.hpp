#pragma once

#include "tdheston/heston_cf.hpp"
#include "tdheston/term_structure.hpp"
#include "tdheston/transform_pricing.hpp"

#include <Eigen/Dense>

#include <vector>

namespace tdheston {

/// Payoff (e^{x_v} - K e^{x_u})^+ paid at t_v; the strike fixes at t_u.
struct ForwardStartSpec {
    double strike_ratio = 1.0;
    double fix_time = 0.0;  ///< t_u
    double expiry = 0.0;    ///< t_v
    double discount = 1.0;  ///< P(0, t_v)

    void validate() const;
};

/// Exponent pieces of the forward-start characteristic function,
/// phi~(X) = exp(c_tilde + x0 + d_tilde v0), the cf of x_v - x_u under the
/// measure weighted by e^{x_u} / F_u.
struct ForwardStartCoeffs {
    Complex c_tilde;
    Complex d_tilde;
};

/// The window [t_u, t_v] is composed with the marginal terminal condition,
/// then [0, t_u] at fixed log-asset argument -i with the window's variance
/// coefficient as initial condition. F_u = E[e^{x_u}] is taken from (x0, v0).
ForwardStartCoeffs forward_start_coeffs(const TermStructure& ts, double t_u, double t_v,
                                        Complex x_arg, double x0, double v0);

/// phi~(X); independent of x0.
Complex forward_start_cf(const TermStructure& ts, double t_u, double t_v, Complex x_arg,
                         double v0);

/// discount * F_u * (phi~(-i) P~'(ln K) - K P'(ln K)).
double forward_start_price(const TermStructure& ts, const ForwardStartSpec& spec, double x0,
                           double v0, const InversionConfig& config = {});

/// Prices one row of strike ratios sharing (t_u, t_v) with a single inversion grid.
std::vector<double> forward_start_prices(const TermStructure& ts, double t_u, double t_v,
                                         const std::vector<double>& strike_ratios,
                                         double discount, double x0, double v0,
                                         const InversionConfig& config = {});

/// Implied volatilities of forward-start options for a fixed tenor.
struct SkewSurface {
    double tenor = 0.0;
    std::vector<double> forward_terms;
    std::vector<double> moneyness;
    Eigen::MatrixXd vols;    ///< rows: forward terms, cols: moneyness; NaN when missing
    Eigen::MatrixXd prices;  ///< undiscounted, in units of S_0

    bool consistent() const;
};

/// For each (t_u, K) prices the forward-start option and inverts the Black
/// formula on the ratio forward F_v / F_u with F_u as scale. Failed
/// inversions become NaN cells rather than errors.
SkewSurface forward_skew(const TermStructure& ts, double tenor,
                         const std::vector<double>& forward_terms,
                         const std::vector<double>& moneyness, double x0, double v0,
                         const InversionConfig& config = {});

}  // namespace tdheston
