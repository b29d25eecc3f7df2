#pragma once

#include <Eigen/Dense>

#include <functional>

namespace tdheston {

struct NelderMeadConfig {
    int max_iterations = 5000;
    double x_tol = 1e-8;   ///< stop when the simplex diameter falls below this
    double f_tol = 1e-12;  ///< or when the spread of vertex values does
    double initial_step = 0.05;  ///< relative step for non-zero coordinates
    double zero_step = 0.00025;  ///< absolute step for zero coordinates
    double absolute_step = 0.0;  ///< when > 0, overrides both steps above
};

struct NelderMeadResult {
    Eigen::VectorXd argmin;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimisation (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Deterministic for a given start.
NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& start,
                                      const NelderMeadConfig& config = {});

}  // namespace tdheston
