#include "support.hpp"

#include "tdheston/errors.hpp"
#include "tdheston/io.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace tdheston;

namespace {

std::string parse_error_message(const auto& f) {
    try {
        f();
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("parse_surface: bundled surface") {
    const auto s = io::parse_surface(io::read_file(support::data_path("eurostoxx_surface.csv")));
    CHECK(s.spot == 3868.64);
    CHECK(s.tenors.size() == 10);
    CHECK(s.moneyness.size() == 7);
    CHECK(s.tenors.front() == doctest::Approx(1.0 / 12.0));
    CHECK(s.tenors.back() == 10.0);
    CHECK(s.vols(3, 4) == doctest::Approx(0.155));
    const auto overridden =
        io::parse_surface(io::read_file(support::data_path("eurostoxx_surface.csv")), 4000.0);
    CHECK(overridden.spot == 4000.0);
}

TEST_CASE("parse_forwards: bundled curve") {
    const auto c = io::parse_forwards(io::read_file(support::data_path("eurostoxx_forwards.csv")));
    CHECK(c.base() == 4107.9);
    CHECK(c.tenors.size() == c.forwards.size());
    CHECK_THROWS_AS(c.at(0.7), DataError);
}

TEST_CASE("parse errors carry line and column") {
    const std::string bad_cell = "spot=100,1m,3m\n1.0,20,abc\n";
    CHECK(parse_error_message([&] { io::parse_surface(bad_cell, std::nullopt, "s.csv"); })
              .rfind("s.csv:2:3:", 0) == 0);
    const std::string ragged = "spot=100,1m,3m\n1.0,20\n";
    CHECK(parse_error_message([&] { io::parse_surface(ragged, std::nullopt, "s.csv"); })
              .rfind("s.csv:2:1:", 0) == 0);
    const std::string bad_tenor = "spot=100,1m,3w\n1.0,20,21\n";
    CHECK(parse_error_message([&] { io::parse_surface(bad_tenor, std::nullopt, "s.csv"); })
              .rfind("s.csv:1:3:", 0) == 0);
    CHECK_THROWS_AS(io::parse_surface("", std::nullopt), ParseError);
    CHECK_THROWS_AS(io::parse_surface("K,1m\n1.0,20\n", std::nullopt), ParseError);
    CHECK_THROWS_AS(io::parse_surface("spot=100,1m\n1.0,\n", std::nullopt), ParseError);
    CHECK_THROWS_AS(io::parse_forwards("1m,3m\n100\n"), ParseError);
    CHECK_THROWS_AS(io::read_file("/nonexistent/file.csv"), ParseError);
}

TEST_CASE("grid formatting round trips") {
    io::LabelledGrid g;
    g.corner = "K \\ Mat";
    g.col_labels = {"1m", "3m"};
    g.row_labels = {"0.9", "1"};
    g.values.resize(2, 2);
    g.values << 1.25, -3.5, std::nan(""), 1e-7;
    const auto back = io::parse_grid(io::format_grid(g));
    CHECK(back.corner == g.corner);
    CHECK(back.col_labels == g.col_labels);
    CHECK(back.row_labels == g.row_labels);
    CHECK(back.values(0, 0) == 1.25);
    CHECK(back.values(0, 1) == -3.5);
    CHECK(std::isnan(back.values(1, 0)));
    CHECK(back.values(1, 1) == 1e-7);
}

TEST_CASE("term structure documents round trip") {
    const auto doc = support::load_structure("eurostoxx_constrained_published.json");
    CHECK(doc.base == 4107.9);
    CHECK(doc.term_structure.v0() == 0.0174);
    CHECK(doc.term_structure.periods().size() == 10);
    const auto back = io::term_structure_from_json(nlohmann::json::parse(io::to_json(doc).dump()));
    CHECK(back.base == doc.base);
    CHECK(back.term_structure.v0() == doc.term_structure.v0());
    for (std::size_t k = 0; k < 10; ++k) {
        const auto& a = doc.term_structure.periods()[k];
        const auto& b = back.term_structure.periods()[k];
        CHECK(a.end_time == b.end_time);
        CHECK(a.params.kappa == b.params.kappa);
        CHECK(a.params.theta == b.params.theta);
        CHECK(a.params.sigma == b.params.sigma);
        CHECK(a.params.rho == b.params.rho);
    }
    CHECK(back.metadata == doc.metadata);
    CHECK_THROWS_AS(io::term_structure_from_json(nlohmann::json::parse(R"({"v0": 0.1})")), ParseError);
    CHECK_THROWS_AS(io::term_structure_from_json(nlohmann::json::parse(
                        R"({"spot_or_forward_base": 1, "v0": 0.1, "periods": [{"end_tenor": "1q"}]})")),
                    ParseError);
}

TEST_CASE("quote and skew tables use the documented layouts") {
    const auto surface = io::parse_surface(io::read_file(support::data_path("eurostoxx_surface.csv")));
    const auto curve = io::parse_forwards(io::read_file(support::data_path("eurostoxx_forwards.csv")));
    const auto grid = quotes_from_surface(surface, curve, default_weight_tiers());
    const auto table = io::quote_table(grid, Eigen::MatrixXd::Zero(7, 10));
    CHECK(table.col_labels.front() == "1m");
    CHECK(table.row_labels.front() == "0.85");
    const auto parsed = io::parse_grid(io::format_grid(table));
    CHECK(parsed.values.rows() == 7);

    SkewSurface skew;
    skew.forward_terms = {0.0, 0.25};
    skew.moneyness = {0.95, 1.0};
    const auto st = io::skew_table(skew, Eigen::MatrixXd::Ones(2, 2));
    CHECK(st.row_labels == std::vector<std::string>{"0", "3m"});
    CHECK(st.col_labels == std::vector<std::string>{"0.95", "1"});
}
