#include "tdheston/nelder_mead.hpp"

#include "tdheston/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace tdheston {

NelderMeadResult nelder_mead_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                      const Eigen::VectorXd& start,
                                      const NelderMeadConfig& config) {
    const Eigen::Index n = start.size();
    if (n == 0) throw ParameterError("Nelder-Mead needs at least one coordinate");

    NelderMeadResult result;
    const auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), start);
    for (Eigen::Index j = 0; j < n; ++j) {
        auto& vertex = simplex[static_cast<std::size_t>(j + 1)];
        if (config.absolute_step > 0.0) {
            vertex[j] += config.absolute_step;
        } else {
            vertex[j] = start[j] != 0.0 ? (1.0 + config.initial_step) * start[j] : config.zero_step;
        }
    }
    std::vector<double> values(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    const auto sort = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    };

    sort();
    while (result.iterations < config.max_iterations) {
        const auto best = order.front();
        const auto worst = order.back();
        const auto second_worst = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& v : simplex) {
            diameter = std::max(diameter, (v - simplex[best]).cwiseAbs().maxCoeff());
        }
        const double spread = values[worst] - values[best];
        if (diameter < config.x_tol || spread < config.f_tol) {
            result.converged = true;
            break;
        }
        ++result.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double f_reflected = eval(reflected);

        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
        } else if (f_reflected < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
        } else {
            bool shrink = false;
            if (f_reflected < values[worst]) {
                const Eigen::VectorXd outside = centroid + 0.5 * (reflected - centroid);
                const double f_outside = eval(outside);
                if (f_outside <= f_reflected) {
                    simplex[worst] = outside;
                    values[worst] = f_outside;
                } else {
                    shrink = true;
                }
            } else {
                const Eigen::VectorXd inside = centroid + 0.5 * (simplex[worst] - centroid);
                const double f_inside = eval(inside);
                if (f_inside < values[worst]) {
                    simplex[worst] = inside;
                    values[worst] = f_inside;
                } else {
                    shrink = true;
                }
            }
            if (shrink) {
                for (std::size_t i = 1; i < order.size(); ++i) {
                    auto& v = simplex[order[i]];
                    v = simplex[best] + 0.5 * (v - simplex[best]);
                    values[order[i]] = eval(v);
                }
            }
        }
        sort();
    }

    result.argmin = simplex[order.front()];
    result.value = values[order.front()];
    return result;
}

}  // namespace tdheston
