#include "tdheston/heston_cf.hpp"

#include "tdheston/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdheston {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// log(1 + z) on the principal branch, accurate for small |z|.
Complex log1p(Complex z) {
    if (std::abs(z) < 0.5) {
        const double re = 0.5 * std::log1p(2.0 * z.real() + std::norm(z));
        return {re, std::atan2(z.imag(), 1.0 + z.real())};
    }
    return std::log(1.0 + z);
}

// (1 - exp(-d tau)) / d, finite as d -> 0.
Complex decay_integral(Complex d, double tau) {
    const Complex z = d * tau;
    if (std::abs(z) < 1e-3) {
        return tau * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0 + z * z * z * z / 120.0);
    }
    return (1.0 - std::exp(-z)) / d;
}

// b - d without cancellation: (b^2 - d^2) = -sigma^2 X (i + X).
Complex b_minus_d(Complex b, Complex d, Complex x_arg, double sigma2) {
    const Complex sum = b + d;
    const Complex naive = b - d;
    if (std::abs(sum) >= std::abs(naive) && std::abs(sum) > 0.0) {
        return -sigma2 * x_arg * (kI + x_arg) / sum;
    }
    return naive;
}

}  // namespace

void PeriodParams::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw ParameterError("kappa must be finite and >= 0, got " + std::to_string(kappa));
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw ParameterError("theta must be finite and >= 0, got " + std::to_string(theta));
    }
    if (!(sigma >= kMinSigma) || !std::isfinite(sigma)) {
        throw ParameterError("sigma must be finite and >= 1e-8, got " + std::to_string(sigma));
    }
    if (!(rho >= -1.0 && rho <= 1.0)) {
        throw ParameterError("rho must lie in [-1, 1], got " + std::to_string(rho));
    }
    if (!std::isfinite(mu)) {
        throw ParameterError("mu must be finite");
    }
}

RiccatiTerms riccati_terms(Complex x_arg, Complex d0, const PeriodParams& p) {
    const double sigma2 = p.sigma * p.sigma;
    RiccatiTerms t;
    t.a = -0.5 * sigma2;
    t.b = p.kappa - kI * x_arg * p.sigma * p.rho;
    t.m = 0.5 * x_arg * (kI + x_arg);
    t.d = std::sqrt(t.b * t.b + sigma2 * x_arg * (kI + x_arg));
    const Complex bmd = b_minus_d(t.b, t.d, x_arg, sigma2);
    t.g = bmd / (t.b + t.d);
    t.g_tilde = (bmd - d0 * sigma2) / (t.b + t.d - d0 * sigma2);
    return t;
}

CfCoeffs period_coeffs(double tau, Complex x_arg, Complex c0, Complex d0,
                       const PeriodParams& params) {
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ParameterError("period length must be finite and >= 0");
    }
    params.validate();
    if (!finite(x_arg) || !finite(c0) || !finite(d0)) {
        throw ParameterError("non-finite transform argument or initial condition");
    }
    if (tau == 0.0) {
        return {c0, d0, kI * x_arg};
    }

    const double sigma2 = params.sigma * params.sigma;
    const Complex b = params.kappa - kI * x_arg * params.sigma * params.rho;
    const Complex xi = x_arg * (kI + x_arg);
    const Complex d = std::sqrt(b * b + sigma2 * xi);
    const Complex bmd = b_minus_d(b, d, x_arg, sigma2);

    // With p = b - d - d0 sigma^2, q = b + d - d0 sigma^2 and E = (1 - e^{-d tau}) / d,
    // 1 - g_tilde e^{-d tau} = d (2 + p E) / q and the closed forms reduce to
    //   D = (-X (i + X) E - d0 (b E - 1 - e^{-d tau})) / (2 + p E)
    //   C = i mu X tau + kappa theta / sigma^2 ((b - d) tau - 2 ln(1 + p E / 2)) + c0
    const Complex e = std::exp(-d * tau);
    const Complex decay = decay_integral(d, tau);
    const Complex p = bmd - d0 * sigma2;
    const Complex denom = 2.0 + p * decay;
    if (std::abs(denom) < 1e-13 * std::max(2.0, std::abs(p * decay))) {
        throw NumericalError("singular Riccati denominator 1 - g_tilde exp(-d tau)");
    }

    const Complex dcoef = (-xi * decay - d0 * (b * decay - 1.0 - e)) / denom;
    const Complex ccoef = kI * params.mu * x_arg * tau +
                          params.kappa * params.theta / sigma2 *
                              (bmd * tau - 2.0 * log1p(0.5 * p * decay)) +
                          c0;
    if (!finite(dcoef) || !finite(ccoef)) {
        throw NumericalError("non-finite characteristic-function coefficient");
    }
    return {ccoef, dcoef, kI * x_arg};
}

Complex evaluate_cf(const CfCoeffs& coeffs, double x0, double v0) {
    return std::exp(coeffs.c + coeffs.d2 * v0 + coeffs.d1 * x0);
}

}  // namespace tdheston
