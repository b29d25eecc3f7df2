#pragma once

#include "tdheston/nelder_mead.hpp"
#include "tdheston/term_structure.hpp"
#include "tdheston/transform_pricing.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdheston {

/// Spot implied-volatility surface: rows are moneyness (strike / spot),
/// columns are tenors. Vols are decimals.
struct VolSurface {
    double spot = 0.0;
    std::vector<double> tenors;
    std::vector<double> moneyness;
    Eigen::MatrixXd vols;

    void validate() const;
};

/// Forwards F_0^{T_i}; the last entry is the delivery forward F_0^P.
struct ForwardCurve {
    std::vector<double> tenors;
    std::vector<double> forwards;

    void validate() const;
    double base() const { return forwards.back(); }
    /// Forward for an exact tenor; throws DataError when absent.
    double at(double tenor) const;
};

/// One calibration instrument expressed on the delivery forward.
struct Quote {
    Eigen::Index row = 0;  ///< moneyness index in the source surface
    Eigen::Index col = 0;  ///< tenor index
    double maturity = 0.0;
    double moneyness = 0.0;
    double adjusted_strike = 0.0;  ///< K F_0^P / F_0^{T_i}
    bool is_call = false;          ///< adjusted strike above F_0^P
    double vol = 0.0;
    double target_bp = 0.0;  ///< undiscounted price / F_0^P * 1e4
    double weight = 0.0;
};

struct QuoteGrid {
    double base_forward = 0.0;
    std::vector<double> tenors;
    std::vector<double> moneyness;
    std::vector<Quote> quotes;  ///< ordered by tenor, then moneyness

    /// Quotes sharing one maturity, in moneyness order.
    std::span<const Quote> slice(std::size_t tenor_index) const;
};

/// Weights by distance from the money: tiers[0] at moneyness 1.00,
/// tiers[k] at |moneyness - 1| = 0.05 k (the last tier repeats).
std::vector<double> default_weight_tiers();
double tier_weight(const std::vector<double>& tiers, double moneyness);

/// Converts spot-option vols into undiscounted options on the delivery forward.
/// Throws DataError when the curve lacks a surface tenor.
QuoteGrid quotes_from_surface(const VolSurface& surface, const ForwardCurve& curve,
                              const std::vector<double>& weight_tiers);

struct ParamRange {
    double min = 0.0;
    double max = 1.0;
};

/// Search box for (v0, theta, kappa, sigma, rho) and the tanh transition constant.
struct Bounds {
    ParamRange v0{0.0, 1.0};
    ParamRange theta{0.0, 1.0};
    ParamRange kappa{0.0, 20.0};
    ParamRange sigma{0.0, 1.5};
    ParamRange rho{-1.0, 1.0};
    double m = 100.0;

    void validate() const;
    static Bounds constrained();
    static Bounds unconstrained();
};

/// p = min + (max - min)/2 (1 + tanh(p_tilde / m)); strictly increasing onto (min, max).
double param_transform(double p_tilde, double min, double max, double m);
/// Inverse of param_transform; p is pulled inside (min, max) first.
double param_inverse(double p, double min, double max, double m);

/// Weighted mean-square error, in bp^2 of F_0^P, of one maturity's quotes
/// when `candidate` is appended to `prefix` up to that maturity. The prefix
/// supplies v0 and may have no periods. Pricing failures give a large
/// finite penalty.
double objective(const PeriodParams& candidate, const TermStructure& prefix,
                 std::span<const Quote> quotes, double base_forward,
                 const InversionConfig& config = {});

inline constexpr double kObjectivePenalty = 1e12;

struct CalibrationOptions {
    /// Absolute start step of 10 in transformed coordinates (0.1 m for m = 100).
    NelderMeadConfig simplex{.absolute_step = 10.0};
    InversionConfig inversion{};
    int restarts = 2;
    unsigned long seed = 20240101;
    std::optional<double> v0_seed;
    std::vector<std::optional<PeriodParams>> period_seeds;  ///< by tenor index
    std::optional<double> max_error_bp;                     ///< report-only threshold
    std::function<void(std::size_t period, double value)> progress;
};

struct CalibrationResult {
    TermStructure term_structure;
    QuoteGrid quotes;
    Eigen::MatrixXd errors_bp;  ///< market - model; rows moneyness, cols tenors
    Eigen::MatrixXd model_bp;
    std::vector<std::vector<double>> objective_trace;  ///< best value after each simplex run
    std::vector<bool> feller;
    std::vector<std::string> warnings;
};

/// Sequential per-maturity fit: the first period also fits v0, which is then
/// frozen; each later period is fitted with all earlier ones fixed.
CalibrationResult bootstrap_calibrate(const VolSurface& surface, const ForwardCurve& curve,
                                      const Bounds& bounds, const std::vector<double>& weight_tiers,
                                      const CalibrationOptions& options = {});

/// Model prices of every quote in bp of F_0^P, in quote order.
std::vector<double> model_prices_bp(const TermStructure& ts, const QuoteGrid& quotes,
                                    const InversionConfig& config = {});

}  // namespace tdheston
