#include "tdheston/forward_start.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/log.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdheston {

namespace {

void check_window(const TermStructure& ts, double t_u, double t_v) {
    if (!(t_u >= 0.0) || !(t_v > t_u)) {
        throw ParameterError("forward start needs 0 <= t_u < t_v");
    }
    if (ts.empty() || t_v > ts.horizon() * (1.0 + 1e-12)) {
        throw HorizonError("forward-start expiry beyond the term-structure horizon");
    }
}

// ln E[e^{x_u}] - x0.
double log_growth_to(const TermStructure& ts, double t_u, double v0) {
    if (t_u == 0.0) return 0.0;
    const Complex g = evaluate_cf(cf_coeffs_to(ts, t_u, -kI, 0.0), 0.0, v0);
    if (!(g.real() > 1e-300) || !std::isfinite(g.real())) {
        throw DegenerateForwardError("vanishing forward at the fixing date");
    }
    return std::log(g.real());
}

}  // namespace

void ForwardStartSpec::validate() const {
    if (!(strike_ratio > 0.0) || !std::isfinite(strike_ratio)) {
        throw ParameterError("strike ratio must be > 0");
    }
    if (!(fix_time >= 0.0) || !(expiry > fix_time)) {
        throw ParameterError("forward start needs 0 <= t_u < t_v");
    }
    if (!(discount > 0.0 && discount <= 1.0)) {
        throw ParameterError("discount must lie in (0, 1]");
    }
}

ForwardStartCoeffs forward_start_coeffs(const TermStructure& ts, double t_u, double t_v,
                                        Complex x_arg, double x0, double v0) {
    check_window(ts, t_u, t_v);
    const CfCoeffs window = cf_coeffs_between(ts, t_u, t_v, x_arg, 0.0, 0.0);
    const CfCoeffs full = t_u > 0.0
                              ? cf_coeffs_between(ts, 0.0, t_u, -kI, window.c, window.d2)
                              : window;
    const double log_forward_u = x0 + log_growth_to(ts, t_u, v0);
    return {full.c - log_forward_u, full.d2};
}

Complex forward_start_cf(const TermStructure& ts, double t_u, double t_v, Complex x_arg,
                         double v0) {
    const auto coeffs = forward_start_coeffs(ts, t_u, t_v, x_arg, 0.0, v0);
    return std::exp(coeffs.c_tilde + coeffs.d_tilde * v0);
}

std::vector<double> forward_start_prices(const TermStructure& ts, double t_u, double t_v,
                                         const std::vector<double>& strike_ratios,
                                         double discount, double x0, double v0,
                                         const InversionConfig& config) {
    check_window(ts, t_u, t_v);
    if (!(v0 >= 0.0)) throw ParameterError("initial variance must be >= 0");
    double max_abs_a = 0.0;
    for (double k : strike_ratios) {
        ForwardStartSpec{k, t_u, t_v, discount}.validate();
        max_abs_a = std::max(max_abs_a, std::abs(std::log(k)));
    }

    // The window coefficients do not depend on x0 or v0; only the [0, t_u]
    // composition and the normaliser do.
    const double log_growth_u = log_growth_to(ts, t_u, v0);
    const auto phi = [&](Complex x) {
        const CfCoeffs window = cf_coeffs_between(ts, t_u, t_v, x, 0.0, 0.0);
        const CfCoeffs full =
            t_u > 0.0 ? cf_coeffs_between(ts, 0.0, t_u, -kI, window.c, window.d2) : window;
        return std::exp(full.c + full.d2 * v0 - log_growth_u);
    };
    const double ratio_growth = phi(-kI).real();
    if (!(ratio_growth > 1e-300) || !std::isfinite(ratio_growth)) {
        throw DegenerateForwardError("vanishing forward ratio");
    }
    const TransformInverter inverter(
        [&](double x) { return std::pair{phi(x), phi(Complex(x, -1.0)) / ratio_growth}; }, config,
        max_abs_a);

    const double forward_u = std::exp(x0 + log_growth_u);
    std::vector<double> out;
    out.reserve(strike_ratios.size());
    for (double k : strike_ratios) {
        const auto tails = inverter.tails(std::log(k));
        out.push_back(std::max(0.0, discount * forward_u * (ratio_growth * tails.tilted - k * tails.plain)));
    }
    return out;
}

double forward_start_price(const TermStructure& ts, const ForwardStartSpec& spec, double x0,
                           double v0, const InversionConfig& config) {
    spec.validate();
    return forward_start_prices(ts, spec.fix_time, spec.expiry, {spec.strike_ratio},
                                spec.discount, x0, v0, config)
        .front();
}

bool SkewSurface::consistent() const {
    const auto rows = static_cast<Eigen::Index>(forward_terms.size());
    const auto cols = static_cast<Eigen::Index>(moneyness.size());
    return vols.rows() == rows && vols.cols() == cols && prices.rows() == rows &&
           prices.cols() == cols;
}

SkewSurface forward_skew(const TermStructure& ts, double tenor,
                         const std::vector<double>& forward_terms,
                         const std::vector<double>& moneyness, double x0, double v0,
                         const InversionConfig& config) {
    if (!(tenor > 0.0)) throw ParameterError("tenor must be > 0");
    SkewSurface out;
    out.tenor = tenor;
    out.forward_terms = forward_terms;
    out.moneyness = moneyness;
    const auto rows = static_cast<Eigen::Index>(forward_terms.size());
    const auto cols = static_cast<Eigen::Index>(moneyness.size());
    out.vols.setConstant(rows, cols, std::numeric_limits<double>::quiet_NaN());
    out.prices.setConstant(rows, cols, std::numeric_limits<double>::quiet_NaN());

    for (Eigen::Index r = 0; r < rows; ++r) {
        const double t_u = forward_terms[static_cast<std::size_t>(r)];
        const double t_v = t_u + tenor;
        std::vector<double> calls;
        try {
            calls = forward_start_prices(ts, t_u, t_v, moneyness, 1.0, x0, v0, config);
        } catch (const QuadratureError& e) {
            log().warn("forward term {}: {}; row left empty", t_u, e.what());
            continue;
        }
        const double forward_u = std::exp(x0 + log_growth_to(ts, t_u, v0));
        const double ratio_forward = std::exp(log_growth_to(ts, t_v, v0) - log_growth_to(ts, t_u, v0));
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double k = moneyness[static_cast<std::size_t>(c)];
            const double call = calls[static_cast<std::size_t>(c)];
            out.prices(r, c) = call / std::exp(x0);
            const bool use_call = k >= ratio_forward;
            const double normalised = use_call ? call / forward_u : call / forward_u - (ratio_forward - k);
            try {
                out.vols(r, c) = implied_vol(normalised, ratio_forward, k, tenor, 1.0, use_call);
            } catch (const NoSolutionError&) {
                // left as NaN
            }
        }
    }
    return out;
}

}  // namespace tdheston
