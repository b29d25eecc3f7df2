#pragma once

#include <complex>

namespace tdheston {

using Complex = std::complex<double>;
inline constexpr Complex kI{0.0, 1.0};

/// Smallest accepted volatility of variance. The closed forms divide by sigma^2.
inline constexpr double kMinSigma = 1e-8;

/// Heston parameters held constant over one period.
struct PeriodParams {
    double kappa = 0.0;  ///< mean reversion rate
    double theta = 0.0;  ///< long-run variance
    double sigma = 0.0;  ///< volatility of the variance process
    double rho = 0.0;    ///< spot/variance correlation
    double mu = 0.0;     ///< risk-neutral drift of the log-underlying

    /// Throws ParameterError when any field is out of its domain.
    void validate() const;

    /// 2*kappa*theta > sigma^2.
    bool feller() const noexcept { return 2.0 * kappa * theta > sigma * sigma; }
};

/// Exponent coefficients of an exponential-affine characteristic function,
/// phi = exp(c + d2 * v + d1 * x).
struct CfCoeffs {
    Complex c{};
    Complex d2{};
    Complex d1{};
};

/// Intermediates of the Riccati solution for one transform argument.
struct RiccatiTerms {
    Complex a;        ///< -sigma^2 / 2
    Complex b;        ///< kappa - i X sigma rho
    Complex m;        ///< X (i + X) / 2
    Complex d;        ///< principal root, Re(d) >= 0
    Complex g;
    Complex g_tilde;  ///< g shifted by the initial variance coefficient
};

RiccatiTerms riccati_terms(Complex x_arg, Complex d0, const PeriodParams& params);

/// Coefficients of E[exp(c0 + d0 v_T + i X x_T) | x_t, v_t] over a period of
/// length tau, i.e. the solution of
///   dD/dtau = sigma^2 D^2 / 2 - (kappa - i X sigma rho) D - X (i + X) / 2
///   dC/dtau = i X mu + kappa theta D
/// with C(0) = c0 and D(0) = d0. Uses the decaying-exponential branch so that
/// |exp(-d tau)| <= 1 for every tau.
///
/// Throws ParameterError on invalid inputs and NumericalError when the
/// denominator 1 - g_tilde exp(-d tau) is within 1e-13 of zero.
CfCoeffs period_coeffs(double tau, Complex x_arg, Complex c0, Complex d0,
                       const PeriodParams& params);

/// exp(c + d2 v0 + d1 x0).
Complex evaluate_cf(const CfCoeffs& coeffs, double x0, double v0);

}  // namespace tdheston
