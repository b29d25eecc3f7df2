#include "tdheston/mc_oracle.hpp"

#include "tdheston/errors.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

namespace tdheston {

namespace {

constexpr std::size_t kBlockPaths = 4096;

struct Step {
    double h;
    std::size_t period;
    int observe;  ///< observation column recorded after this step, or -1
};

std::vector<Step> build_grid(const TermStructure& ts, const std::vector<double>& times, double dt) {
    std::vector<double> keys = times;
    for (const auto& p : ts.periods()) {
        if (p.end_time < times.back()) keys.push_back(p.end_time);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

    std::vector<Step> steps;
    double prev = 0.0;
    std::size_t period = 0;
    const auto& periods = ts.periods();
    for (double key : keys) {
        while (period + 1 < periods.size() && periods[period].end_time <= prev) ++period;
        const double span = key - prev;
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
        for (std::size_t k = 0; k < n; ++k) steps.push_back({span / static_cast<double>(n), period, -1});
        const auto obs = std::find(times.begin(), times.end(), key);
        if (obs != times.end()) steps.back().observe = static_cast<int>(obs - times.begin());
        prev = key;
    }
    return steps;
}

}  // namespace

McScheme parse_scheme(std::string_view name) {
    if (name == "euler_full_truncation" || name == "full_truncation") {
        return McScheme::euler_full_truncation;
    }
    if (name == "euler_absorbing" || name == "absorbing") return McScheme::euler_absorbing;
    throw ParameterError("unknown Monte Carlo scheme '" + std::string(name) + "'");
}

void McConfig::validate() const {
    if (n_paths < 2) throw ParameterError("n_paths must be >= 2");
    if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
    if (threads == 0) throw ParameterError("threads must be >= 1");
}

McEstimate estimate(const Eigen::Ref<const Eigen::VectorXd>& values, bool antithetic) {
    Eigen::VectorXd samples;
    if (antithetic) {
        const Eigen::Index pairs = values.size() / 2;
        samples.resize(pairs);
        for (Eigen::Index k = 0; k < pairs; ++k) samples[k] = 0.5 * (values[2 * k] + values[2 * k + 1]);
    } else {
        samples = values;
    }
    const auto n = static_cast<double>(samples.size());
    if (n < 2) throw ParameterError("need at least two samples");
    const double mean = samples.mean();
    const double var = (samples.array() - mean).square().sum() / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

McSamples simulate_paths(const TermStructure& ts, const std::vector<double>& times, double x0,
                         const McConfig& config) {
    config.validate();
    if (times.empty() || !std::is_sorted(times.begin(), times.end()) || !(times.front() > 0.0)) {
        throw ParameterError("observation times must be positive and increasing");
    }
    if (ts.empty() || times.back() > ts.horizon() * (1.0 + 1e-12)) {
        throw HorizonError("simulation horizon beyond the term structure");
    }

    std::size_t n_paths = config.n_paths;
    if (config.antithetic && n_paths % 2 == 1) ++n_paths;
    const auto steps = build_grid(ts, times, config.dt);
    const auto cols = static_cast<Eigen::Index>(times.size());

    McSamples out;
    out.times = times;
    out.antithetic = config.antithetic;
    out.log_spot.resize(static_cast<Eigen::Index>(n_paths), cols);
    out.variance.resize(static_cast<Eigen::Index>(n_paths), cols);
    out.spot_driver.resize(static_cast<Eigen::Index>(n_paths), cols);
    out.variance_driver.resize(static_cast<Eigen::Index>(n_paths), cols);

    const std::size_t blocks = (n_paths + kBlockPaths - 1) / kBlockPaths;
    const auto& periods = ts.periods();
    const bool absorbing = config.scheme == McScheme::euler_absorbing;

    const auto run_block = [&](std::size_t block) {
        std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(block)};
        std::mt19937_64 rng(seq);
        boost::random::normal_distribution<double> normal;
        const std::size_t first = block * kBlockPaths;
        const std::size_t last = std::min(n_paths, first + kBlockPaths);
        std::vector<double> z1(steps.size());
        std::vector<double> z2(steps.size());
        for (std::size_t path = first; path < last; ++path) {
            const bool mirror = config.antithetic && (path % 2 == 1);
            if (!mirror) {
                for (std::size_t s = 0; s < steps.size(); ++s) {
                    z1[s] = normal(rng);
                    z2[s] = normal(rng);
                }
            }
            const double sign = mirror ? -1.0 : 1.0;
            double x = x0;
            double v = ts.v0();
            double w_spot = 0.0;
            double w_var = 0.0;
            const auto row = static_cast<Eigen::Index>(path);
            for (std::size_t s = 0; s < steps.size(); ++s) {
                const auto& step = steps[s];
                const auto& p = periods[step.period].params;
                const double sqrt_h = std::sqrt(step.h);
                const double dw = sign * z1[s] * sqrt_h;
                const double dy = sign * (p.rho * z1[s] + std::sqrt(1.0 - p.rho * p.rho) * z2[s]) * sqrt_h;
                const double vp = std::max(v, 0.0);
                const double root = std::sqrt(vp);
                x += (p.mu - 0.5 * vp) * step.h + root * dw;
                v = (absorbing ? vp : v) + p.kappa * (p.theta - vp) * step.h + p.sigma * root * dy;
                if (absorbing) v = std::max(v, 0.0);
                w_spot += dw;
                w_var += dy;
                if (step.observe >= 0) {
                    out.log_spot(row, step.observe) = x;
                    out.variance(row, step.observe) = absorbing ? v : std::max(v, 0.0);
                    out.spot_driver(row, step.observe) = w_spot;
                    out.variance_driver(row, step.observe) = w_var;
                }
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < blocks; b += workers) run_block(b);
            });
        }
    }
    return out;
}

McSamples simulate_terminal(const TermStructure& ts, double t, double x0, const McConfig& config) {
    return simulate_paths(ts, {t}, x0, config);
}

McEstimate mc_vanilla_price(const TermStructure& ts, const VanillaSpec& spec, double x0,
                            const McConfig& config) {
    spec.validate();
    const auto samples = simulate_terminal(ts, spec.maturity, x0, config);
    const Eigen::ArrayXd spot = samples.log_spot.col(0).array().exp();
    const double sign = spec.is_call ? 1.0 : -1.0;
    const Eigen::VectorXd payoff =
        (sign * (spot - spec.strike)).max(0.0).matrix() * spec.discount;
    return estimate(payoff, config.antithetic);
}

}  // namespace tdheston
