#include "support.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/mc_oracle.hpp"

#include <doctest.h>

#include <cmath>

using namespace tdheston;

namespace {

const PeriodParams kFeller{2.0, 0.09, 0.3, -0.5, 0.0};

}  // namespace

TEST_CASE("McConfig and scheme names") {
    McConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.n_paths = 1;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    cfg = McConfig{};
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ParameterError);
    CHECK(parse_scheme("full_truncation") == McScheme::euler_full_truncation);
    CHECK(parse_scheme("euler_absorbing") == McScheme::euler_absorbing);
    CHECK_THROWS_AS(parse_scheme("milstein"), ParameterError);
}

TEST_CASE("simulate_paths: input checks") {
    const TermStructure ts(0.09, {{1.0, kFeller}});
    McConfig cfg;
    cfg.n_paths = 10;
    CHECK_THROWS_AS(simulate_paths(ts, {2.0}, 0.0, cfg), HorizonError);
    CHECK_THROWS_AS(simulate_paths(ts, {0.5, 0.2}, 0.0, cfg), ParameterError);
    CHECK_THROWS_AS(simulate_paths(ts, {}, 0.0, cfg), ParameterError);
}

TEST_CASE("estimate: plain and antithetic pairing") {
    Eigen::VectorXd v(4);
    v << 1.0, 3.0, 2.0, 6.0;
    const auto plain = estimate(v, false);
    CHECK(plain.mean == doctest::Approx(3.0));
    CHECK(plain.standard_error == doctest::Approx(std::sqrt((4.0 + 0.0 + 1.0 + 9.0) / 3.0 / 4.0)));
    const auto paired = estimate(v, true);
    CHECK(paired.mean == doctest::Approx(3.0));
    CHECK(paired.standard_error == doctest::Approx(1.0));
}

TEST_CASE("simulate_terminal: seeded determinism and thread independence") {
    const TermStructure ts(0.09, {{0.3, kFeller}, {1.0, {1.0, 0.05, 0.4, -0.2, 0.01}}});
    McConfig cfg;
    cfg.n_paths = 10000;
    cfg.seed = 5;
    const auto a = simulate_paths(ts, {0.5, 1.0}, 0.0, cfg);
    const auto b = simulate_paths(ts, {0.5, 1.0}, 0.0, cfg);
    CHECK(a.log_spot == b.log_spot);
    CHECK(a.variance == b.variance);
    cfg.threads = 3;
    const auto c = simulate_paths(ts, {0.5, 1.0}, 0.0, cfg);
    CHECK(a.log_spot == c.log_spot);
    cfg.seed = 6;
    const auto d = simulate_paths(ts, {0.5, 1.0}, 0.0, cfg);
    CHECK(a.log_spot != d.log_spot);
    CHECK((a.variance.array() >= 0.0).all());
}

TEST_CASE("simulate_terminal: standard error scales with the path count") {
    const TermStructure ts(0.09, {{1.0, kFeller}});
    double prev = 0.0;
    for (std::size_t n : {10000u, 40000u, 160000u}) {
        McConfig cfg;
        cfg.n_paths = n;
        cfg.seed = 11;
        const auto est = mc_vanilla_price(ts, {1.0, 1.0, true, 1.0}, 0.0, cfg);
        if (prev > 0.0) {
            const double ratio = est.standard_error / prev;
            CHECK(ratio >= 0.4);
            CHECK(ratio <= 0.6);
        }
        prev = est.standard_error;
    }
}

TEST_CASE("simulate_terminal: negligible vol of variance is arithmetic Brownian motion") {
    const double theta = 0.04;
    const double mu = 0.03;
    const TermStructure ts(theta, {{2.0, {1.0, theta, 1e-8, -0.5, mu}}});
    McConfig cfg;
    cfg.n_paths = 200000;
    cfg.dt = 1.0 / 52.0;
    cfg.seed = 13;
    const auto s = simulate_terminal(ts, 2.0, 0.0, cfg);
    const Eigen::VectorXd x = s.log_spot.col(0);
    const auto m = estimate(x, false);
    CHECK(std::abs(m.mean - (mu - 0.5 * theta) * 2.0) <= 3.0 * m.standard_error);
    const Eigen::VectorXd sq = (x.array() - (mu - 0.5 * theta) * 2.0).square().matrix();
    const auto var = estimate(sq, false);
    CHECK(std::abs(var.mean - theta * 2.0) <= 3.0 * var.standard_error);
}

TEST_CASE("simulate_paths: independent drivers when rho = 0") {
    const TermStructure ts(0.09, {{1.0, {2.0, 0.09, 0.3, 0.0, 0.0}}});
    McConfig cfg;
    cfg.n_paths = 100000;
    cfg.dt = 1.0 / 52.0;
    cfg.seed = 17;
    const auto s = simulate_terminal(ts, 1.0, 0.0, cfg);
    const Eigen::ArrayXd w = s.spot_driver.col(0).array();
    const Eigen::ArrayXd y = s.variance_driver.col(0).array();
    const double corr = ((w - w.mean()) * (y - y.mean())).mean() /
                        std::sqrt((w - w.mean()).square().mean() * (y - y.mean()).square().mean());
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(cfg.n_paths)));
}

TEST_CASE("simulate_terminal: martingale under Feller parameters") {
    const TermStructure ts(0.09, {{1.0, kFeller}});
    McConfig cfg;
    cfg.n_paths = 1000000;
    cfg.seed = 19;
    const double x0 = std::log(100.0);
    const auto s = simulate_terminal(ts, 1.0, x0, cfg);
    const Eigen::VectorXd spot = s.log_spot.col(0).array().exp().matrix();
    const auto est = estimate(spot, false);
    const double analytic = marginal_cf(ts, 1.0, -kI, x0).real();
    CHECK(analytic == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(std::abs(est.mean - analytic) <= 3.0 * est.standard_error);
}

TEST_CASE("mc_vanilla_price: agrees with the analytic price") {
    const TermStructure ts(0.09, {{1.0, kFeller}});
    McConfig cfg;
    cfg.n_paths = 1000000;
    cfg.seed = 23;
    const double x0 = std::log(100.0);
    const VanillaSpec spec{100.0, 1.0, true, 1.0};
    const auto est = mc_vanilla_price(ts, spec, x0, cfg);
    const double analytic = vanilla_price(ts, spec, x0, ts.v0());
    CHECK(std::abs(est.mean - analytic) <= 3.0 * est.standard_error);
}

TEST_CASE("mc_vanilla_price: zero variance gives the discounted intrinsic value") {
    const TermStructure ts(1e-10, {{1.0, {1.0, 1e-10, 1e-8, 0.0, 0.02}}});
    McConfig cfg;
    cfg.n_paths = 1000;
    cfg.dt = 1.0 / 12.0;
    const auto est = mc_vanilla_price(ts, {95.0, 1.0, true, 0.9}, std::log(100.0), cfg);
    CHECK(est.mean == doctest::Approx(0.9 * (100.0 * std::exp(0.02) - 95.0)).epsilon(1e-4));
}

TEST_CASE("absorbing scheme keeps the variance non-negative and inflates prices") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    const auto& ts = doc.term_structure;
    McConfig cfg;
    cfg.n_paths = 20000;
    cfg.dt = 1.0 / 365.0;
    cfg.seed = 29;
    cfg.scheme = McScheme::euler_absorbing;
    const auto s = simulate_terminal(ts, 2.0, 0.0, cfg);
    CHECK((s.variance.array() >= 0.0).all());
    const auto absorbing = mc_vanilla_price(ts, {1.0, 2.0, true, 1.0}, 0.0, cfg);
    cfg.scheme = McScheme::euler_full_truncation;
    const auto truncated = mc_vanilla_price(ts, {1.0, 2.0, true, 1.0}, 0.0, cfg);
    CHECK(absorbing.mean > truncated.mean);
}
