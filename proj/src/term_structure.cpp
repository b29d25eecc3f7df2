#include "tdheston/term_structure.hpp"

#include "tdheston/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace tdheston {

namespace {

// Maturities computed from the same tenor string compare equal; this slack
// only absorbs values that went through a text round trip.
constexpr double kTimeSlack = 1e-12;

}  // namespace

TermStructure::TermStructure(double v0, std::vector<Period> periods)
    : v0_(v0), periods_(std::move(periods)) {
    if (!(v0_ >= 0.0) || !std::isfinite(v0_)) {
        throw ParameterError("initial variance must be finite and >= 0");
    }
    double prev = 0.0;
    for (const auto& p : periods_) {
        if (!(p.end_time > prev) || !std::isfinite(p.end_time)) {
            throw ParameterError("period end times must be finite and strictly increasing from 0");
        }
        p.params.validate();
        prev = p.end_time;
    }
}

TermStructure TermStructure::with_period(double end_time, const PeriodParams& params) const {
    auto periods = periods_;
    periods.push_back({end_time, params});
    return TermStructure(v0_, std::move(periods));
}

TermStructure TermStructure::extended_to(double t) const {
    if (periods_.empty()) {
        throw ParameterError("cannot extend an empty term structure");
    }
    if (t <= horizon()) return *this;
    auto periods = periods_;
    periods.back().end_time = t;
    return TermStructure(v0_, std::move(periods));
}

TermStructure TermStructure::split_at(double t) const {
    std::vector<Period> periods;
    periods.reserve(periods_.size() + 1);
    double start = 0.0;
    for (const auto& p : periods_) {
        if (t > start && t < p.end_time) {
            periods.push_back({t, p.params});
        }
        periods.push_back(p);
        start = p.end_time;
    }
    return TermStructure(v0_, std::move(periods));
}

CfCoeffs cf_coeffs_between(const TermStructure& ts, double t_start, double t_end,
                           Complex x_arg, Complex c0, Complex d0) {
    if (ts.empty()) {
        throw HorizonError("empty term structure");
    }
    if (!(t_start >= 0.0) || !(t_end >= t_start)) {
        throw ParameterError("invalid time window");
    }
    if (t_end > ts.horizon() * (1.0 + kTimeSlack)) {
        std::ostringstream msg;
        msg << "time " << t_end << " is beyond the term-structure horizon " << ts.horizon();
        throw HorizonError(msg.str());
    }

    CfCoeffs acc{c0, d0, kI * x_arg};
    const auto& periods = ts.periods();
    for (std::size_t k = periods.size(); k-- > 0;) {
        const double start = k == 0 ? 0.0 : periods[k - 1].end_time;
        const double lo = std::max(start, t_start);
        const double hi = std::min(periods[k].end_time, t_end);
        if (hi <= lo) continue;
        acc = period_coeffs(hi - lo, x_arg, acc.c, acc.d2, periods[k].params);
    }
    return acc;
}

CfCoeffs cf_coeffs_to(const TermStructure& ts, double t, Complex x_arg, Complex v_arg) {
    if (!(t > 0.0)) {
        throw HorizonError("maturity must be > 0");
    }
    return cf_coeffs_between(ts, 0.0, t, x_arg, 0.0, kI * v_arg);
}

Complex marginal_cf(const TermStructure& ts, double t, Complex x_arg, double x0,
                    std::optional<double> v0_override) {
    const double v0 = v0_override.value_or(ts.v0());
    if (!(v0 >= 0.0)) {
        throw ParameterError("initial variance must be >= 0");
    }
    return evaluate_cf(cf_coeffs_to(ts, t, x_arg, 0.0), x0, v0);
}

double parse_tenor(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) {
        throw ParseError("empty tenor");
    }
    const char unit = static_cast<char>(std::tolower(static_cast<unsigned char>(text.back())));
    if (unit == 'm' || unit == 'y') {
        const auto digits = text.substr(0, text.size() - 1);
        int count = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), count);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || count < 0) {
            throw ParseError("bad tenor '" + std::string(text) + "'");
        }
        return unit == 'm' ? count / 12.0 : static_cast<double>(count);
    }
    // from_chars for double is not available on every toolchain we target.
    std::string owned(text);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(owned, &used);
    } catch (const std::exception&) {
        throw ParseError("bad tenor '" + owned + "'");
    }
    if (used != owned.size() || !(value >= 0.0)) {
        throw ParseError("bad tenor '" + owned + "'");
    }
    return value;
}

std::string format_tenor(double years) {
    if (years == 0.0) return "0";
    const double months = years * 12.0;
    const double rounded = std::round(months);
    if (std::abs(months - rounded) < 1e-9 && rounded > 0) {
        const auto whole = static_cast<long>(rounded);
        if (whole % 12 == 0) return std::to_string(whole / 12) + "y";
        return std::to_string(whole) + "m";
    }
    std::ostringstream out;
    out.precision(17);
    out << years;
    return out.str();
}

}  // namespace tdheston
