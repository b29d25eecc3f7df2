#pragma once

#include "tdheston/heston_cf.hpp"
#include "tdheston/io.hpp"
#include "tdheston/mc_oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

namespace support {

inline std::string data_path(const std::string& name) {
    return std::string(TDHESTON_DATA_DIR) + "/" + name;
}

inline tdheston::io::TermStructureDocument load_structure(const std::string& name) {
    return tdheston::io::term_structure_from_json(
        nlohmann::json::parse(tdheston::io::read_file(data_path(name))));
}

/// Uniform draw inside the constrained search box.
inline tdheston::PeriodParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    tdheston::PeriodParams p;
    p.kappa = 0.1 + 19.9 * u(rng);
    p.theta = 0.005 + 0.5 * u(rng);
    p.sigma = 0.05 + 1.45 * u(rng);
    p.rho = -0.99 + 1.98 * u(rng);
    return p;
}

struct ComplexEstimate {
    tdheston::Complex mean;
    double se_re = 0.0;
    double se_im = 0.0;

    bool within(tdheston::Complex value, double n_se) const {
        return std::abs(mean.real() - value.real()) <= n_se * se_re &&
               std::abs(mean.imag() - value.imag()) <= n_se * se_im;
    }
};

/// Mean and standard errors of complex samples.
inline ComplexEstimate complex_estimate(const Eigen::VectorXcd& z) {
    const auto re = tdheston::estimate(z.real(), false);
    const auto im = tdheston::estimate(z.imag(), false);
    return {{re.mean, im.mean}, re.standard_error, im.standard_error};
}

}  // namespace support
