#include "tdheston/transform_pricing.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/log.hpp"
#include "tdheston/quadrature.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numbers>

namespace tdheston {

namespace {

constexpr double kPi = std::numbers::pi;

// Radians of e^{-i X a} allowed inside one panel.
constexpr double kMaxPhasePerPanel = 25.0;

// Consecutive quiet panels required before truncating.
constexpr int kQuietPanels = 2;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

template <typename F>
double adaptive_panel(const GaussLegendreRule& rule, const F& f, double lo, double hi,
                      double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = integrate_panel<double>(rule, f, lo, mid);
    const double right = integrate_panel<double>(rule, f, mid, hi);
    if (std::abs(left + right - whole) <= tol || depth >= 12) {
        return left + right;
    }
    return adaptive_panel(rule, f, lo, mid, left, 0.5 * tol, depth + 1) +
           adaptive_panel(rule, f, mid, hi, right, 0.5 * tol, depth + 1);
}

}  // namespace

void InversionConfig::validate() const {
    if (!(abs_tol > 0.0)) throw ParameterError("abs_tol must be > 0");
    if (!(min_arg > 0.0) || !(max_arg > min_arg)) {
        throw ParameterError("need max_arg > min_arg > 0");
    }
    if (panel_order < 2) throw ParameterError("panel_order must be >= 2");
    if (!(panel_width > 0.0)) throw ParameterError("panel_width must be > 0");
}

void VanillaSpec::validate() const {
    if (!(strike > 0.0) || !std::isfinite(strike)) throw ParameterError("strike must be > 0");
    if (!(maturity > 0.0) || !std::isfinite(maturity)) throw ParameterError("maturity must be > 0");
    if (!(discount > 0.0 && discount <= 1.0)) throw ParameterError("discount must lie in (0, 1]");
}

double tail_probability(const RealCf& cf, double a, const InversionConfig& config) {
    config.validate();
    assert(std::abs(cf(0.0) - 1.0) < 1e-9 && "characteristic function must equal 1 at 0");

    const auto& rule = gauss_legendre(config.panel_order);
    const auto integrand = [&](double x) {
        const Complex z = cf(x) * std::exp(Complex(0.0, -x * a));
        return z.imag() / (kPi * x);
    };
    const double panel_tol = 1e-2 * config.abs_tol;

    // Removable singularity at 0: the integrand's limit times the sliver width.
    double sum = 0.5 + config.min_arg * integrand(config.min_arg);
    double lo = config.min_arg;
    int quiet = 0;
    while (true) {
        const double hi = lo + config.panel_width;
        if (hi > config.max_arg) {
            throw QuadratureError("tail probability did not converge before max_arg",
                                  clamp_probability(sum));
        }
        const double whole = integrate_panel<double>(rule, integrand, lo, hi);
        sum += adaptive_panel(rule, integrand, lo, hi, whole, panel_tol, 0);

        double envelope = 0.0;
        const double half = 0.5 * (hi - lo);
        for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
            const double x = lo + half * (rule.nodes[k] + 1.0);
            envelope = std::max(envelope, std::abs(cf(x)) / (kPi * x));
        }
        quiet = envelope * config.panel_width < config.abs_tol ? quiet + 1 : 0;
        if (quiet >= kQuietPanels) break;
        lo = hi;
    }
    return clamp_probability(sum);
}

double tilted_tail_probability(const ComplexCf& cf, double a, const InversionConfig& config) {
    const Complex norm = cf(-kI);
    if (!(std::abs(norm) >= 1e-300) || !std::isfinite(std::abs(norm))) {
        throw DegenerateForwardError("phi(-i) vanishes; the share measure is undefined");
    }
    return tail_probability([&](double x) { return cf(Complex(x, -1.0)) / norm; }, a, config);
}

TransformInverter::TransformInverter(const PairCf& cf, const InversionConfig& config,
                                     double max_abs_log_strike)
    : config_(config) {
    config_.validate();
    if (max_abs_log_strike > 0.0) {
        config_.panel_width =
            std::min(config_.panel_width, kMaxPhasePerPanel / max_abs_log_strike);
    }
    const auto& rule = gauss_legendre(config_.panel_order);
    const double width = config_.panel_width;

    const auto push = [&](double x, double w) {
        const auto [plain, tilted] = cf(x);
        args_.push_back(x);
        weights_.push_back(w);
        plain_.push_back(plain);
        tilted_.push_back(tilted);
        return std::max(std::abs(plain), std::abs(tilted)) / (kPi * x);
    };

    push(config_.min_arg, config_.min_arg);
    double lo = config_.min_arg;
    int quiet = 0;
    while (true) {
        const double hi = lo + width;
        if (hi > config_.max_arg) {
            converged_ = false;
            return;
        }
        const double half = 0.5 * width;
        double envelope = 0.0;
        for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
            envelope = std::max(envelope, push(lo + half * (rule.nodes[k] + 1.0), half * rule.weights[k]));
        }
        quiet = envelope * width < config_.abs_tol ? quiet + 1 : 0;
        if (quiet >= kQuietPanels) break;
        lo = hi;
    }
    converged_ = true;
}

TransformInverter::Tails TransformInverter::tails(double a) const {
    double plain = 0.0;
    double tilted = 0.0;
    for (std::size_t k = 0; k < args_.size(); ++k) {
        const double x = args_[k];
        const Complex phase = std::exp(Complex(0.0, -x * a));
        const double scale = weights_[k] / x;
        plain += scale * (plain_[k] * phase).imag();
        tilted += scale * (tilted_[k] * phase).imag();
    }
    Tails out{clamp_probability(0.5 + plain / kPi), clamp_probability(0.5 + tilted / kPi)};
    if (!converged_) {
        throw QuadratureError("transform grid reached max_arg before converging", out.plain);
    }
    return out;
}

double black_scholes_price(double forward, double strike, double vol, double t, double discount,
                           bool is_call) {
    if (!(forward > 0.0) || !(strike > 0.0)) {
        throw ParameterError("forward and strike must be > 0");
    }
    if (!(vol >= 0.0) || !(t >= 0.0)) {
        throw ParameterError("vol and time must be >= 0");
    }
    const double sd = vol * std::sqrt(t);
    if (!(sd > 0.0)) {
        return discount * std::max(is_call ? forward - strike : strike - forward, 0.0);
    }
    const double d1 = (std::log(forward / strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    if (is_call) {
        return discount * (forward * normal_cdf(d1) - strike * normal_cdf(d2));
    }
    return discount * (strike * normal_cdf(-d2) - forward * normal_cdf(-d1));
}

double implied_vol(double price, double forward, double strike, double t, double discount,
                   bool is_call) {
    if (!(t > 0.0) || !(discount > 0.0 && discount <= 1.0)) {
        throw ParameterError("implied vol needs t > 0 and discount in (0, 1]");
    }
    const double intrinsic = discount * std::max(is_call ? forward - strike : strike - forward, 0.0);
    const double upper = discount * (is_call ? forward : strike);
    const double slack = 1e-13 * upper;
    if (!std::isfinite(price) || price < intrinsic - slack || price >= upper) {
        throw NoSolutionError("price outside the no-arbitrage bounds");
    }
    if (price <= intrinsic) return 0.0;

    const auto excess = [&](double vol) {
        return black_scholes_price(forward, strike, vol, t, discount, is_call) - price;
    };
    double lo = 1e-6;
    double hi = 5.0;
    double f_lo = excess(lo);
    double f_hi = excess(hi);
    if (f_lo > 0.0) {
        lo = 0.0;
        f_lo = excess(lo);
    }
    if (f_hi < 0.0) {
        hi = 50.0;
        f_hi = excess(hi);
        if (f_hi < 0.0) throw NoSolutionError("implied vol above 5000%");
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        excess, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(), max_iter);
    return std::abs(excess(a)) <= std::abs(excess(b)) ? a : b;
}

double forward_growth(const TermStructure& ts, double maturity, double v0) {
    const Complex g = evaluate_cf(cf_coeffs_to(ts, maturity, -kI, 0.0), 0.0, v0);
    if (!(std::abs(g) >= 1e-300) || !std::isfinite(g.real())) {
        throw DegenerateForwardError("vanishing forward");
    }
    return g.real();
}

std::vector<double> vanilla_prices(const TermStructure& ts, std::span<const VanillaSpec> specs,
                                   double x0, double v0, const InversionConfig& config) {
    if (!(v0 >= 0.0)) throw ParameterError("initial variance must be >= 0");
    std::map<double, std::vector<std::size_t>> by_maturity;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        specs[i].validate();
        by_maturity[specs[i].maturity].push_back(i);
    }

    std::vector<double> out(specs.size());
    for (const auto& [maturity, indices] : by_maturity) {
        // Log-variable centred on the spot: y = x_T - x0.
        const auto centred = [&, t = maturity](Complex x) {
            return evaluate_cf(cf_coeffs_to(ts, t, x, 0.0), 0.0, v0);
        };
        const double growth = forward_growth(ts, maturity, v0);
        const double forward = std::exp(x0) * growth;

        double max_abs_a = 0.0;
        for (auto i : indices) {
            max_abs_a = std::max(max_abs_a, std::abs(std::log(specs[i].strike) - x0));
        }
        const TransformInverter inverter(
            [&](double x) {
                return std::pair{centred(x), centred(Complex(x, -1.0)) / growth};
            },
            config, max_abs_a);

        for (auto i : indices) {
            const auto& spec = specs[i];
            const auto tails = inverter.tails(std::log(spec.strike) - x0);
            const double call = spec.discount * (forward * tails.tilted - spec.strike * tails.plain);
            double price = spec.is_call ? call : call - spec.discount * (forward - spec.strike);
            if (price < 0.0) {
                if (price < -config.abs_tol * std::max(forward, spec.strike)) {
                    log().warn("negative price {} clamped to 0 (K={}, T={})", price, spec.strike,
                               spec.maturity);
                }
                price = 0.0;
            }
            out[i] = price;
        }
    }
    return out;
}

double vanilla_price(const TermStructure& ts, const VanillaSpec& spec, double x0, double v0,
                     const InversionConfig& config) {
    return vanilla_prices(ts, std::span(&spec, 1), x0, v0, config).front();
}

}  // namespace tdheston
