#include "tdheston/calibration.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/log.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace tdheston {

namespace {

constexpr double kTenorMatch = 1e-9;

// Start points are kept where tanh still has slope (|p~| <= 3 m), so a
// previous fit sitting on a bound does not freeze that coordinate.
constexpr double kStartLimit = 3.0;

void check_range(const ParamRange& r, const char* name) {
    if (!(r.min < r.max) || !std::isfinite(r.min) || !std::isfinite(r.max)) {
        throw ParameterError(std::string("bad search range for ") + name);
    }
}

// Search coordinates: (v0, theta, kappa, sigma, rho) for the first period,
// (theta, kappa, sigma, rho) afterwards.
struct Coordinates {
    const Bounds& bounds;
    bool with_v0;

    Eigen::Index size() const { return with_v0 ? 5 : 4; }

    Eigen::VectorXd encode(double v0, const PeriodParams& p) const {
        Eigen::VectorXd x(size());
        Eigen::Index k = 0;
        const double limit = kStartLimit * bounds.m;
        const auto put = [&](double value, const ParamRange& r) {
            x[k++] = std::clamp(param_inverse(value, r.min, r.max, bounds.m), -limit, limit);
        };
        if (with_v0) put(v0, bounds.v0);
        put(p.theta, bounds.theta);
        put(p.kappa, bounds.kappa);
        put(p.sigma, bounds.sigma);
        put(p.rho, bounds.rho);
        return x;
    }

    std::pair<double, PeriodParams> decode(const Eigen::VectorXd& x, double v0) const {
        Eigen::Index k = 0;
        const auto get = [&](const ParamRange& r) {
            return param_transform(x[k++], r.min, r.max, bounds.m);
        };
        if (with_v0) v0 = get(bounds.v0);
        PeriodParams p;
        p.theta = get(bounds.theta);
        p.kappa = get(bounds.kappa);
        p.sigma = get(bounds.sigma);
        p.rho = get(bounds.rho);
        p.mu = 0.0;
        return {v0, p};
    }
};

}  // namespace

void VolSurface::validate() const {
    if (!(spot > 0.0)) throw DataError("surface spot must be > 0");
    if (tenors.empty() || moneyness.empty()) throw DataError("empty volatility surface");
    if (vols.rows() != static_cast<Eigen::Index>(moneyness.size()) ||
        vols.cols() != static_cast<Eigen::Index>(tenors.size())) {
        throw DataError("volatility grid is not rectangular");
    }
    if (!(vols.array() > 0.0).all() || !vols.allFinite()) {
        throw DataError("volatilities must be finite and > 0");
    }
    for (std::size_t j = 1; j < tenors.size(); ++j) {
        if (!(tenors[j] > tenors[j - 1])) throw DataError("surface tenors must be increasing");
    }
    if (!(tenors.front() > 0.0)) throw DataError("surface tenors must be > 0");
}

void ForwardCurve::validate() const {
    if (tenors.empty() || tenors.size() != forwards.size()) {
        throw DataError("forward curve needs one forward per tenor");
    }
    for (double f : forwards) {
        if (!(f > 0.0) || !std::isfinite(f)) throw DataError("forwards must be > 0");
    }
}

double ForwardCurve::at(double tenor) const {
    for (std::size_t i = 0; i < tenors.size(); ++i) {
        if (std::abs(tenors[i] - tenor) < kTenorMatch) return forwards[i];
    }
    throw DataError("no forward for tenor " + format_tenor(tenor));
}

std::span<const Quote> QuoteGrid::slice(std::size_t tenor_index) const {
    const std::size_t per_tenor = moneyness.size();
    if (tenor_index >= tenors.size()) throw ParameterError("tenor index out of range");
    return std::span(quotes).subspan(tenor_index * per_tenor, per_tenor);
}

std::vector<double> default_weight_tiers() { return {100.0, 45.0, 35.0, 5.0}; }

double tier_weight(const std::vector<double>& tiers, double moneyness) {
    if (tiers.empty()) throw ParameterError("empty weight tiers");
    const auto step = static_cast<std::size_t>(std::lround(std::abs(moneyness - 1.0) / 0.05));
    return tiers[std::min(step, tiers.size() - 1)];
}

QuoteGrid quotes_from_surface(const VolSurface& surface, const ForwardCurve& curve,
                              const std::vector<double>& weight_tiers) {
    surface.validate();
    curve.validate();
    QuoteGrid grid;
    grid.base_forward = curve.base();
    grid.tenors = surface.tenors;
    grid.moneyness = surface.moneyness;
    grid.quotes.reserve(surface.tenors.size() * surface.moneyness.size());
    for (std::size_t j = 0; j < surface.tenors.size(); ++j) {
        const double tenor = surface.tenors[j];
        const double forward_at_tenor = curve.at(tenor);
        for (std::size_t i = 0; i < surface.moneyness.size(); ++i) {
            Quote q;
            q.row = static_cast<Eigen::Index>(i);
            q.col = static_cast<Eigen::Index>(j);
            q.maturity = tenor;
            q.moneyness = surface.moneyness[i];
            q.adjusted_strike = q.moneyness * surface.spot * grid.base_forward / forward_at_tenor;
            q.is_call = q.adjusted_strike > grid.base_forward;
            q.vol = surface.vols(q.row, q.col);
            q.target_bp = black_scholes_price(grid.base_forward, q.adjusted_strike, q.vol, tenor,
                                              1.0, q.is_call) /
                          grid.base_forward * 1e4;
            q.weight = tier_weight(weight_tiers, q.moneyness);
            if (!(q.weight > 0.0)) throw ParameterError("weights must be > 0");
            grid.quotes.push_back(q);
        }
    }
    return grid;
}

void Bounds::validate() const {
    check_range(v0, "v0");
    check_range(theta, "theta");
    check_range(kappa, "kappa");
    check_range(sigma, "sigma");
    check_range(rho, "rho");
    if (rho.min < -1.0 || rho.max > 1.0) throw ParameterError("rho range must lie in [-1, 1]");
    if (!(m > 0.0)) throw ParameterError("transition constant m must be > 0");
}

Bounds Bounds::constrained() { return {}; }

Bounds Bounds::unconstrained() {
    Bounds b;
    b.v0 = {0.0, 100.0};
    b.theta = {0.0, 100.0};
    b.kappa = {0.0, 100.0};
    b.sigma = {0.0, 100.0};
    b.rho = {-1.0, 1.0};
    return b;
}

double param_transform(double p_tilde, double min, double max, double m) {
    // tanh rounds to +-1 for |p~| > ~19 m; keep the image open as for the inverse.
    const double span = max - min;
    const double p = min + 0.5 * span * (1.0 + std::tanh(p_tilde / m));
    return std::clamp(p, min + 1e-12 * span, max - 1e-12 * span);
}

double param_inverse(double p, double min, double max, double m) {
    const double span = max - min;
    const double inner = std::clamp(p, min + 1e-12 * span, max - 1e-12 * span);
    return m * std::atanh(2.0 * (inner - min) / span - 1.0);
}

std::vector<double> model_prices_bp(const TermStructure& ts, const QuoteGrid& quotes,
                                    const InversionConfig& config) {
    std::vector<VanillaSpec> specs;
    specs.reserve(quotes.quotes.size());
    for (const auto& q : quotes.quotes) {
        specs.push_back({q.adjusted_strike, q.maturity, q.is_call, 1.0});
    }
    auto prices = vanilla_prices(ts, specs, std::log(quotes.base_forward), ts.v0(), config);
    for (auto& p : prices) p = p / quotes.base_forward * 1e4;
    return prices;
}

double objective(const PeriodParams& candidate, const TermStructure& prefix,
                 std::span<const Quote> quotes, double base_forward,
                 const InversionConfig& config) {
    if (quotes.empty()) throw ParameterError("objective needs at least one quote");
    const double maturity = quotes.front().maturity;
    std::vector<VanillaSpec> specs;
    specs.reserve(quotes.size());
    double weight_sum = 0.0;
    for (const auto& q : quotes) {
        if (q.maturity != maturity) throw ParameterError("objective quotes must share a maturity");
        specs.push_back({q.adjusted_strike, q.maturity, q.is_call, 1.0});
        weight_sum += q.weight;
    }
    if (!(maturity > prefix.horizon())) {
        throw ParameterError("candidate period must extend the prefix");
    }
    try {
        const TermStructure ts = prefix.with_period(maturity, candidate);
        const auto prices = vanilla_prices(ts, specs, std::log(base_forward), ts.v0(), config);
        double total = 0.0;
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            const double diff = prices[i] / base_forward * 1e4 - quotes[i].target_bp;
            total += quotes[i].weight / weight_sum * diff * diff;
        }
        return std::isfinite(total) ? total : kObjectivePenalty;
    } catch (const Error&) {
        return kObjectivePenalty;
    }
}

CalibrationResult bootstrap_calibrate(const VolSurface& surface, const ForwardCurve& curve,
                                      const Bounds& bounds, const std::vector<double>& weight_tiers,
                                      const CalibrationOptions& options) {
    bounds.validate();
    CalibrationResult result;
    result.quotes = quotes_from_surface(surface, curve, weight_tiers);
    const auto& grid = result.quotes;

    // First-period start: variance at the ATM vol of the shortest tenor.
    const auto atm = std::min_element(surface.moneyness.begin(), surface.moneyness.end(),
                                      [](double a, double b) { return std::abs(a - 1.0) < std::abs(b - 1.0); }) -
                     surface.moneyness.begin();
    const double atm_var = std::pow(surface.vols(atm, 0), 2);
    double v0 = options.v0_seed.value_or(atm_var);
    PeriodParams start{2.0, atm_var, 0.5, -0.5, 0.0};

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> jitter(0.0, 0.25 * bounds.m);

    const NelderMeadConfig& simplex = options.simplex;

    TermStructure fitted(v0, {});
    for (std::size_t j = 0; j < grid.tenors.size(); ++j) {
        const bool first = j == 0;
        const Coordinates coords{bounds, first};
        if (j < options.period_seeds.size() && options.period_seeds[j]) {
            start = *options.period_seeds[j];
        }
        const auto quotes = grid.slice(j);
        const TermStructure prefix = first ? TermStructure(v0, {}) : fitted;

        const auto f = [&](const Eigen::VectorXd& x) {
            const auto [cand_v0, params] = coords.decode(x, prefix.v0());
            try {
                const TermStructure base = first ? TermStructure(cand_v0, {}) : prefix;
                return objective(params, base, quotes, grid.base_forward, options.inversion);
            } catch (const Error&) {
                return kObjectivePenalty;
            }
        };

        std::vector<double> trace;
        auto best = nelder_mead_minimize(f, coords.encode(v0, start), simplex);
        trace.push_back(best.value);
        // A previous fit on a degenerate corner (kappa -> 0, theta -> max) is a
        // poor start; also run from a neutral point at this tenor's ATM variance.
        if (!first) {
            const double tenor_var = std::pow(surface.vols(atm, static_cast<Eigen::Index>(j)), 2);
            const PeriodParams neutral{2.0, tenor_var, 0.5, -0.5, 0.0};
            auto trial = nelder_mead_minimize(f, coords.encode(v0, neutral), simplex);
            if (trial.value < best.value) best = std::move(trial);
            trace.push_back(best.value);
        }
        for (int r = 0; r < options.restarts; ++r) {
            Eigen::VectorXd from = best.argmin;
            for (Eigen::Index k = 0; k < from.size(); ++k) from[k] += jitter(rng);
            auto trial = nelder_mead_minimize(f, from, simplex);
            if (trial.value < best.value) best = std::move(trial);
            trace.push_back(best.value);
        }
        // Polish from the best vertex with a fresh simplex.
        {
            auto polish = nelder_mead_minimize(f, best.argmin, simplex);
            if (polish.value < best.value) best = std::move(polish);
            trace.push_back(best.value);
        }

        const auto [fit_v0, params] = coords.decode(best.argmin, prefix.v0());
        if (first) v0 = fit_v0;
        fitted = (first ? TermStructure(v0, {}) : fitted).with_period(grid.tenors[j], params);
        result.objective_trace.push_back(std::move(trace));
        log().info("period {} ({}): objective {:.6g} bp^2, theta {:.4f} kappa {:.4f} sigma {:.4f} rho {:.4f}",
                   j + 1, format_tenor(grid.tenors[j]), best.value, params.theta, params.kappa,
                   params.sigma, params.rho);
        if (options.progress) options.progress(j, best.value);
        start = params;
    }

    result.term_structure = fitted;
    const auto model = model_prices_bp(fitted, grid, options.inversion);
    const auto rows = static_cast<Eigen::Index>(grid.moneyness.size());
    const auto cols = static_cast<Eigen::Index>(grid.tenors.size());
    result.errors_bp.setZero(rows, cols);
    result.model_bp.setZero(rows, cols);
    for (std::size_t k = 0; k < grid.quotes.size(); ++k) {
        const auto& q = grid.quotes[k];
        result.model_bp(q.row, q.col) = model[k];
        result.errors_bp(q.row, q.col) = q.target_bp - model[k];
    }
    for (const auto& p : fitted.periods()) result.feller.push_back(p.params.feller());

    if (options.max_error_bp) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double worst = result.errors_bp.col(c).cwiseAbs().maxCoeff();
            if (worst > *options.max_error_bp) {
                std::ostringstream msg;
                msg << "period " << format_tenor(grid.tenors[static_cast<std::size_t>(c)])
                    << " max |error| " << worst << " bp exceeds " << *options.max_error_bp << " bp";
                result.warnings.push_back(msg.str());
                log().warn("{}", msg.str());
            }
        }
    }
    return result;
}

}  // namespace tdheston
