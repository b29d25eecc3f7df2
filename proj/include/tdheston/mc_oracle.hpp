#pragma once

#include "tdheston/term_structure.hpp"
#include "tdheston/transform_pricing.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace tdheston {

enum class McScheme {
    euler_full_truncation,  ///< max(v, 0) inside drift and diffusion only
    euler_absorbing,        ///< v clamped to 0 after every step
};

McScheme parse_scheme(std::string_view name);

struct McConfig {
    std::size_t n_paths = 100000;
    double dt = 1.0 / 365.0;
    McScheme scheme = McScheme::euler_full_truncation;
    std::uint64_t seed = 1;
    bool antithetic = false;
    unsigned threads = 1;

    void validate() const;
};

/// Simulated states, one row per path and one column per observation time.
struct McSamples {
    std::vector<double> times;
    Eigen::MatrixXd log_spot;
    Eigen::MatrixXd variance;
    Eigen::MatrixXd spot_driver;      ///< accumulated Brownian increment of x (diagnostics)
    Eigen::MatrixXd variance_driver;  ///< accumulated Brownian increment of v
    bool antithetic = false;
};

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Sample mean and standard error; antithetic pairs (rows 2k, 2k+1) are
/// averaged first so the error reflects the pairing.
McEstimate estimate(const Eigen::Ref<const Eigen::VectorXd>& values, bool antithetic);

/// Euler simulation of the log-spot and variance with piecewise-constant
/// parameters, v_0 taken from the term structure. Steps are shortened so
/// that period boundaries and observation times fall on the grid. Paths are
/// split into blocks with derived seeds, so results do not depend on the
/// thread count.
McSamples simulate_paths(const TermStructure& ts, const std::vector<double>& times, double x0,
                         const McConfig& config);

McSamples simulate_terminal(const TermStructure& ts, double t, double x0, const McConfig& config);

/// Discounted payoff mean and standard error.
McEstimate mc_vanilla_price(const TermStructure& ts, const VanillaSpec& spec, double x0,
                            const McConfig& config);

}  // namespace tdheston
