#pragma once

#include "tdheston/heston_cf.hpp"
#include "tdheston/term_structure.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace tdheston {

/// Settings of the panel Gauss-Legendre inversion of a characteristic function.
struct InversionConfig {
    double abs_tol = 1e-9;      ///< target absolute error of each probability
    double max_arg = 1e4;       ///< hard cap on the transform variable
    int panel_order = 32;       ///< Gauss-Legendre points per panel
    double panel_width = 4.0;   ///< width of one panel in the transform variable
    double min_arg = 1e-8;      ///< sliver [0, min_arg] uses the X -> 0 limit

    void validate() const;
};

struct VanillaSpec {
    double strike = 0.0;
    double maturity = 0.0;
    bool is_call = true;
    double discount = 1.0;  ///< P(0, T)

    void validate() const;
};

using RealCf = std::function<Complex(double)>;
using ComplexCf = std::function<Complex(Complex)>;

/// P(x > a) = 1/2 + 1/pi int_0^inf Re(phi(X) e^{-i X a} / (i X)) dX for a
/// characteristic function with phi(-X) = conj(phi(X)). Panels are refined
/// adaptively and the integration stops once the envelope |phi(X)| / (pi X)
/// over a whole panel stays below abs_tol. The result is clamped to [0, 1].
/// Throws QuadratureError (with the partial estimate) when max_arg is reached.
double tail_probability(const RealCf& cf, double a, const InversionConfig& config = {});

/// Same probability under the share measure: the cf is replaced by
/// phi(X - i) / phi(-i). Throws DegenerateForwardError when |phi(-i)| < 1e-300.
double tilted_tail_probability(const ComplexCf& cf, double a, const InversionConfig& config = {});

/// Shares one set of characteristic-function evaluations across many strikes.
///
/// The evaluator returns (phi(X), phi_tilted(X)) at real X for a log-variable
/// already centred on the spot, so strikes enter only through the phase
/// e^{-i X a}. Panels have fixed width; the grid ends where both envelopes
/// fall below abs_tol, which bounds the truncation error for every strike.
class TransformInverter {
public:
    using PairCf = std::function<std::pair<Complex, Complex>(double)>;

    struct Tails {
        double plain;   ///< P(y > a)
        double tilted;  ///< P~(y > a)
    };

    /// max_abs_log_strike narrows the panels so that e^{-i X a} stays resolved
    /// for every |a| up to that bound.
    TransformInverter(const PairCf& cf, const InversionConfig& config = {},
                      double max_abs_log_strike = 0.0);

    /// Throws QuadratureError when the grid hit max_arg before converging.
    Tails tails(double a) const;

    std::size_t evaluations() const noexcept { return args_.size(); }

private:
    InversionConfig config_;
    std::vector<double> args_;
    std::vector<double> weights_;
    std::vector<Complex> plain_;
    std::vector<Complex> tilted_;
    bool converged_ = false;
};

/// Undiscounted-forward Black formula times the discount factor.
/// vol * sqrt(t) == 0 returns the discounted intrinsic value.
double black_scholes_price(double forward, double strike, double vol, double t,
                           double discount, bool is_call);

/// Volatility reproducing the price; bracketed root search on [1e-6, 5],
/// widened to [0, 50] when the root lies outside. Throws NoSolutionError
/// when the price violates the no-arbitrage bounds.
double implied_vol(double price, double forward, double strike, double t, double discount,
                   bool is_call);

/// Vanilla price from the two inversion probabilities; puts via parity.
double vanilla_price(const TermStructure& ts, const VanillaSpec& spec, double x0, double v0,
                     const InversionConfig& config = {});

/// Prices many vanillas, sharing characteristic-function evaluations
/// between specs with the same maturity. Output order follows the input.
std::vector<double> vanilla_prices(const TermStructure& ts, std::span<const VanillaSpec> specs,
                                   double x0, double v0, const InversionConfig& config = {});

/// E[S_T] / S_0 = phi(-i) e^{-x0}: the forward growth factor to maturity.
double forward_growth(const TermStructure& ts, double maturity, double v0);

}  // namespace tdheston
