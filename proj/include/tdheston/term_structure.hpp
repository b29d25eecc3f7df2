#pragma once

#include "tdheston/heston_cf.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tdheston {

/// One period of a term structure: parameters in force up to end_time.
struct Period {
    double end_time = 0.0;
    PeriodParams params;
};

/// Initial variance plus piecewise-constant Heston parameters. The first
/// period starts at 0; end times are strictly increasing.
class TermStructure {
public:
    TermStructure() = default;

    /// Throws ParameterError on an invalid configuration.
    TermStructure(double v0, std::vector<Period> periods);

    double v0() const noexcept { return v0_; }
    const std::vector<Period>& periods() const noexcept { return periods_; }
    double horizon() const noexcept { return periods_.empty() ? 0.0 : periods_.back().end_time; }
    bool empty() const noexcept { return periods_.empty(); }

    /// Copy with one more period appended (end_time beyond the current horizon).
    TermStructure with_period(double end_time, const PeriodParams& params) const;

    /// Copy whose last period is stretched to reach t (no-op when t <= horizon).
    TermStructure extended_to(double t) const;

    /// Copy with an artificial boundary at t; pricing is unchanged by construction.
    TermStructure split_at(double t) const;

private:
    double v0_ = 0.0;
    std::vector<Period> periods_;
};

/// Composes the per-period coefficients backwards over [t_start, t_end],
/// starting from the exponent c0 + d0 v(t_end) + i X x(t_end).
/// Periods straddling either end are truncated.
CfCoeffs cf_coeffs_between(const TermStructure& ts, double t_start, double t_end,
                           Complex x_arg, Complex c0, Complex d0);

/// Coefficients of E[exp(i X x_t + i V v_t)] as an affine exponent in (x_0, v_0).
/// Throws HorizonError when t is outside (0, horizon].
CfCoeffs cf_coeffs_to(const TermStructure& ts, double t, Complex x_arg, Complex v_arg);

/// E[exp(i X x_t)] given x_0 and v_0 (the structure's own v0 unless overridden).
Complex marginal_cf(const TermStructure& ts, double t, Complex x_arg, double x0,
                    std::optional<double> v0_override = std::nullopt);

/// "1m" -> 1/12, "10y" -> 10. Plain decimals are accepted as year fractions.
/// Throws ParseError on anything else.
double parse_tenor(std::string_view text);

/// Inverse of parse_tenor for whole months/years; otherwise a decimal.
std::string format_tenor(double years);

}  // namespace tdheston
