#include "oracles.hpp"
#include "support.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/term_structure.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tdheston;

namespace {

double max_abs_diff(const CfCoeffs& a, const CfCoeffs& b) {
    return std::max({std::abs(a.c - b.c), std::abs(a.d2 - b.d2), std::abs(a.d1 - b.d1)});
}

TermStructure random_structure(std::mt19937_64& rng, int n_periods) {
    std::uniform_real_distribution<double> len(0.05, 2.0);
    std::vector<Period> periods;
    double end = 0.0;
    for (int k = 0; k < n_periods; ++k) {
        end += len(rng);
        periods.push_back({end, support::random_params(rng)});
    }
    return TermStructure(0.03, std::move(periods));
}

}  // namespace

TEST_CASE("TermStructure: construction rules") {
    const PeriodParams p{2.0, 0.04, 0.5, -0.7, 0.0};
    CHECK_THROWS_AS(TermStructure(-0.01, {{1.0, p}}), ParameterError);
    CHECK_THROWS_AS(TermStructure(0.04, {{1.0, p}, {1.0, p}}), ParameterError);
    CHECK_THROWS_AS(TermStructure(0.04, {{0.0, p}}), ParameterError);
    const TermStructure ts(0.04, {{1.0, p}});
    CHECK(ts.horizon() == 1.0);
    CHECK(ts.with_period(2.0, p).periods().size() == 2);
    CHECK_THROWS_AS(ts.with_period(0.5, p), ParameterError);
    CHECK(ts.extended_to(3.0).horizon() == 3.0);
    CHECK(ts.extended_to(0.5).horizon() == 1.0);
}

TEST_CASE("cf_coeffs_to: single period equals period_coeffs") {
    const PeriodParams p{2.0, 0.04, 0.5, -0.7, 0.0};
    const TermStructure ts(0.04, {{1.5, p}});
    for (double x : {-3.0, 0.4, 9.0}) {
        CHECK(max_abs_diff(cf_coeffs_to(ts, 1.5, x, 0.0), period_coeffs(1.5, x, 0.0, 0.0, p)) <=
              1e-15);
    }
}

TEST_CASE("cf_coeffs_to: identical halves compose to the full period") {
    const PeriodParams p{1.2, 0.06, 0.8, -0.5, 0.01};
    const TermStructure one(0.04, {{2.0, p}});
    const TermStructure two(0.04, {{1.0, p}, {2.0, p}});
    for (double x : {-12.0, -1.0, 0.3, 5.0, 30.0}) {
        CHECK(max_abs_diff(cf_coeffs_to(one, 2.0, x, 0.0), cf_coeffs_to(two, 2.0, x, 0.0)) <= 1e-10);
    }
}

TEST_CASE("cf_coeffs_to: two distinct periods match the chained ODE oracle") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    const auto& p = doc.term_structure.periods();
    const TermStructure ts(doc.term_structure.v0(), {p[0], p[1]});
    const auto closed = cf_coeffs_to(ts, ts.horizon(), 0.5, 0.0);
    const auto ode = oracle::integrate_to(ts, ts.horizon(), 0.5, 0.0);
    CHECK(max_abs_diff(closed, ode) <= 1e-8);
}

TEST_CASE("cf_coeffs_to: split invariance") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    std::uniform_real_distribution<double> x_u(-20.0, 20.0);
    for (int k = 0; k < 20; ++k) {
        const auto ts = random_structure(rng, 3);
        const std::size_t which = static_cast<std::size_t>(k % 3);
        const double start = which == 0 ? 0.0 : ts.periods()[which - 1].end_time;
        const double cut = start + u(rng) * (ts.periods()[which].end_time - start);
        const auto split = ts.split_at(cut);
        CHECK(split.periods().size() == 4);
        const double x = x_u(rng);
        const double t = ts.horizon() * (0.5 + 0.5 * u(rng));
        CHECK(max_abs_diff(cf_coeffs_to(ts, t, x, 0.2), cf_coeffs_to(split, t, x, 0.2)) <= 1e-10);
    }
}

TEST_CASE("cf_coeffs_between: zero-length window is a no-op") {
    std::mt19937_64 rng(29);
    const auto ts = random_structure(rng, 3);
    const Complex c0{0.1, -0.2};
    const Complex d0{0.0, 0.4};
    const double t = ts.periods()[1].end_time;
    const auto r = cf_coeffs_between(ts, t, t, 2.0, c0, d0);
    CHECK(std::abs(r.c - c0) <= 1e-15);
    CHECK(std::abs(r.d2 - d0) <= 1e-15);
}

TEST_CASE("cf_coeffs_to: interior maturities truncate the period") {
    std::mt19937_64 rng(31);
    const auto ts = random_structure(rng, 3);
    const double t = 0.5 * (ts.periods()[0].end_time + ts.periods()[1].end_time);
    const auto closed = cf_coeffs_to(ts, t, 1.7, 0.0);
    const auto ode = oracle::integrate_to(ts, t, 1.7, 0.0);
    CHECK(max_abs_diff(closed, ode) <= 1e-8);
}

TEST_CASE("cf_coeffs_to: composed conjugate symmetry") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> x_u(0.1, 30.0);
    for (int k = 0; k < 20; ++k) {
        const auto ts = random_structure(rng, 4);
        const double x = x_u(rng);
        const auto plus = cf_coeffs_to(ts, ts.horizon(), x, 0.0);
        const auto minus = cf_coeffs_to(ts, ts.horizon(), -x, 0.0);
        CHECK(std::abs(minus.c - std::conj(plus.c)) <= 1e-12);
        CHECK(std::abs(minus.d2 - std::conj(plus.d2)) <= 1e-12);
    }
}

TEST_CASE("marginal_cf: normalisation and martingale at every tenor") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    const auto& ts = doc.term_structure;
    const double x0 = std::log(doc.base);
    for (const auto& period : ts.periods()) {
        const double t = period.end_time;
        CHECK(std::abs(marginal_cf(ts, t, 0.0, x0) - 1.0) <= 1e-12);
        const Complex fwd = marginal_cf(ts, t, -kI, x0);
        CHECK(std::abs(fwd - doc.base) <= 1e-9 * doc.base);
    }
}

TEST_CASE("marginal_cf: horizon errors") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    CHECK_THROWS_AS(marginal_cf(doc.term_structure, 10.5, 1.0, 0.0), HorizonError);
    CHECK_THROWS_AS(marginal_cf(doc.term_structure, 0.0, 1.0, 0.0), HorizonError);
    CHECK_NOTHROW(marginal_cf(doc.term_structure.extended_to(12.0), 12.0, 1.0, 0.0));
}

TEST_CASE("marginal_cf: constrained structure matches Monte Carlo at 1y") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    const auto& ts = doc.term_structure;
    const double x0 = std::log(doc.base);
    const Complex analytic = marginal_cf(ts, 1.0, 1.0, x0);

    McConfig mc;
    mc.n_paths = 1000000;
    mc.seed = 103;
    const auto s = simulate_terminal(ts, 1.0, x0, mc);
    const Eigen::VectorXcd z = (kI * s.log_spot.col(0).array()).exp().matrix();
    CHECK(support::complex_estimate(z).within(analytic, 3.0));
}

TEST_CASE("tenor strings") {
    CHECK(parse_tenor("1m") == doctest::Approx(1.0 / 12.0));
    CHECK(parse_tenor("18m") == doctest::Approx(1.5));
    CHECK(parse_tenor("10y") == 10.0);
    CHECK(parse_tenor("0.25") == 0.25);
    CHECK_THROWS_AS(parse_tenor("3w"), ParseError);
    CHECK_THROWS_AS(parse_tenor(""), ParseError);
    for (const char* s : {"1m", "3m", "6m", "9m", "1y", "2y", "10y"}) {
        CHECK(format_tenor(parse_tenor(s)) == s);
    }
}
