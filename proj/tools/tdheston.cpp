// tdheston: calibrate, price, forward-skew and check subcommands.

#include "tdheston/calibration.hpp"
#include "tdheston/errors.hpp"
#include "tdheston/forward_start.hpp"
#include "tdheston/io.hpp"
#include "tdheston/log.hpp"
#include "tdheston/mc_oracle.hpp"
#include "tdheston/term_structure.hpp"
#include "tdheston/transform_pricing.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace tdheston;

namespace {

std::vector<double> parse_tenor_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_tenor(item));
    }
    if (out.empty()) throw ParseError("empty list '" + text + "'");
    return out;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size()) throw ParseError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ParseError("empty list '" + text + "'");
    return out;
}

Bounds load_bounds(const std::string& spec) {
    if (spec == "constrained") return Bounds::constrained();
    if (spec == "unconstrained") return Bounds::unconstrained();
    const auto j = nlohmann::json::parse(io::read_file(spec), nullptr, false);
    if (j.is_discarded()) throw ParseError(spec + ": invalid JSON");
    Bounds b;
    const auto range = [&](const char* key, ParamRange& r) {
        if (!j.contains(key)) return;
        const auto& v = j.at(key);
        if (!v.is_array() || v.size() != 2) throw ParseError(spec + ": '" + key + "' must be [min, max]");
        r = {v[0].get<double>(), v[1].get<double>()};
    };
    range("v0", b.v0);
    range("theta", b.theta);
    range("kappa", b.kappa);
    range("sigma", b.sigma);
    range("rho", b.rho);
    b.m = j.value("m", b.m);
    b.validate();
    return b;
}

nlohmann::json bounds_json(const Bounds& b) {
    const auto r = [](const ParamRange& p) { return nlohmann::json::array({p.min, p.max}); };
    return {{"v0", r(b.v0)}, {"theta", r(b.theta)}, {"kappa", r(b.kappa)},
            {"sigma", r(b.sigma)}, {"rho", r(b.rho)}, {"m", b.m}};
}

io::TermStructureDocument load_structure(const std::string& path, bool extend, double horizon) {
    auto doc = io::term_structure_from_json(nlohmann::json::parse(io::read_file(path), nullptr, false));
    if (doc.term_structure.empty()) throw DataError(path + ": no periods");
    if (horizon > doc.term_structure.horizon() && extend) {
        log().warn("extending the last period from {} to {} years", doc.term_structure.horizon(), horizon);
        doc.term_structure = doc.term_structure.extended_to(horizon);
    }
    return doc;
}

std::string parameter_table(const TermStructure& ts) {
    std::ostringstream out;
    out << fmt::format("v0 = {:.4f}\n", ts.v0());
    out << fmt::format("{:>6}", "P\\Mat");
    for (const auto& p : ts.periods()) out << fmt::format("{:>9}", format_tenor(p.end_time));
    out << '\n';
    const auto row = [&](const char* name, auto get) {
        out << fmt::format("{:>6}", name);
        for (const auto& p : ts.periods()) out << fmt::format("{:>9.4f}", get(p.params));
        out << '\n';
    };
    row("theta", [](const PeriodParams& p) { return p.theta; });
    row("kappa", [](const PeriodParams& p) { return p.kappa; });
    row("sigma", [](const PeriodParams& p) { return p.sigma; });
    row("rho", [](const PeriodParams& p) { return p.rho; });
    out << fmt::format("{:>6}", "feller");
    for (const auto& p : ts.periods()) out << fmt::format("{:>9}", p.params.feller() ? "yes" : "no");
    out << '\n';
    return out.str();
}

struct Common {
    double abs_tol = 1e-9;
    unsigned threads = 1;
    std::uint64_t seed = 20240101;

    InversionConfig inversion() const {
        InversionConfig cfg;
        cfg.abs_tol = abs_tol;
        cfg.validate();
        return cfg;
    }
};

struct CalibrateArgs {
    std::string surface;
    std::string forwards;
    std::optional<double> spot;
    std::string bounds = "constrained";
    std::string weights = "100,45,35,5";
    std::string out_dir = ".";
    int restarts = 2;
    std::optional<double> max_error_bp;
};

int run_calibrate(const CalibrateArgs& a, const Common& c) {
    // Parse everything before touching the output directory.
    const auto surface = io::parse_surface(io::read_file(a.surface), a.spot, a.surface);
    const auto curve = io::parse_forwards(io::read_file(a.forwards), a.forwards);
    const auto bounds = load_bounds(a.bounds);
    const auto tiers = parse_number_list(a.weights);

    CalibrationOptions opts;
    opts.inversion = c.inversion();
    opts.seed = c.seed;
    opts.restarts = a.restarts;
    opts.max_error_bp = a.max_error_bp;
    opts.progress = [&](std::size_t period, double value) {
        std::cerr << fmt::format("period {}/{} ({}) objective {:.4g} bp^2\n", period + 1,
                                 surface.tenors.size(), format_tenor(surface.tenors[period]), value);
    };
    const auto result = bootstrap_calibrate(surface, curve, bounds, tiers, opts);

    io::TermStructureDocument doc;
    doc.base = result.quotes.base_forward;
    doc.term_structure = result.term_structure;
    doc.metadata = {{"bounds_used", bounds_json(bounds)},
                    {"weights", tiers},
                    {"feller", result.feller},
                    {"seed", c.seed}};

    std::ostringstream report;
    report << parameter_table(result.term_structure);
    report << fmt::format("max |market - model| = {:.3f} bp\n", result.errors_bp.cwiseAbs().maxCoeff());
    for (const auto& w : result.warnings) report << "warning: " << w << '\n';

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    io::write_file(dir / "term_structure.json", to_json(doc).dump(2) + "\n");
    io::write_file(dir / "errors.csv", io::format_grid(io::quote_table(result.quotes, result.errors_bp)));
    io::write_file(dir / "model_prices.csv", io::format_grid(io::quote_table(result.quotes, result.model_bp)));
    io::write_file(dir / "report.txt", report.str());
    std::cout << report.str();
    return 0;
}

struct PriceArgs {
    std::string structure;
    std::string product = "vanilla";
    double strike = 0.0;
    std::string maturity;
    bool put = false;
    double discount = 1.0;
    double ratio = 1.0;
    std::string fix = "0";
    std::string expiry;
    std::string surface;
    std::string forwards;
    std::optional<double> spot;
    std::string csv;
    bool extend = false;
};

int run_price_batch(const PriceArgs& a, const Common& c) {
    const auto surface = io::parse_surface(io::read_file(a.surface), a.spot, a.surface);
    const auto curve = io::parse_forwards(io::read_file(a.forwards), a.forwards);
    const auto grid = quotes_from_surface(surface, curve, default_weight_tiers());
    const double horizon = *std::max_element(grid.tenors.begin(), grid.tenors.end());
    const auto doc = load_structure(a.structure, a.extend, horizon);
    const auto model = model_prices_bp(doc.term_structure, grid, c.inversion());
    Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.moneyness.size()),
                           static_cast<Eigen::Index>(grid.tenors.size()));
    for (std::size_t k = 0; k < grid.quotes.size(); ++k) {
        values(grid.quotes[k].row, grid.quotes[k].col) = model[k];
    }
    const auto text = io::format_grid(io::quote_table(grid, values), 8);
    if (!a.csv.empty()) io::write_file(a.csv, text);
    std::cout << text;
    return 0;
}

int run_price(const PriceArgs& a, const Common& c) {
    if (!a.surface.empty() || !a.forwards.empty()) {
        if (a.surface.empty() || a.forwards.empty()) {
            throw ParameterError("batch pricing needs both --surface and --forwards");
        }
        return run_price_batch(a, c);
    }
    const auto cfg = c.inversion();
    std::ostringstream line;
    if (a.product == "vanilla") {
        if (a.maturity.empty()) throw ParameterError("--maturity is required");
        const double t = parse_tenor(a.maturity);
        const auto doc = load_structure(a.structure, a.extend, t);
        const double x0 = std::log(doc.base);
        const VanillaSpec spec{a.strike, t, !a.put, a.discount};
        const double price = vanilla_price(doc.term_structure, spec, x0, doc.term_structure.v0(), cfg);
        const double forward = doc.base * forward_growth(doc.term_structure, t, doc.term_structure.v0());
        std::string vol;
        try {
            vol = fmt::format("{:.10g}", implied_vol(price, forward, a.strike, t, a.discount, !a.put));
        } catch (const NoSolutionError& e) {
            log().warn("implied vol: {}", e.what());
        }
        line << "product,strike,maturity,side,price,price_bp,implied_vol\n"
             << fmt::format("vanilla,{},{},{},{:.12g},{:.10g},{}\n", a.strike, format_tenor(t),
                            a.put ? "put" : "call", price, price / doc.base * 1e4, vol);
    } else if (a.product == "forward-start") {
        if (a.expiry.empty()) throw ParameterError("--expiry is required");
        const double t_u = parse_tenor(a.fix);
        const double t_v = parse_tenor(a.expiry);
        const auto doc = load_structure(a.structure, a.extend, t_v);
        const auto& ts = doc.term_structure;
        const double x0 = std::log(doc.base);
        const ForwardStartSpec spec{a.ratio, t_u, t_v, a.discount};
        const double price = forward_start_price(ts, spec, x0, ts.v0(), cfg);
        const double g_u = t_u > 0.0 ? forward_growth(ts, t_u, ts.v0()) : 1.0;
        const double g_v = forward_growth(ts, t_v, ts.v0());
        std::string vol;
        try {
            vol = fmt::format("{:.10g}", implied_vol(price / (doc.base * g_u), g_v / g_u, a.ratio,
                                                     t_v - t_u, a.discount, true));
        } catch (const NoSolutionError& e) {
            log().warn("implied vol: {}", e.what());
        }
        line << "product,strike_ratio,fix,expiry,price,price_bp,implied_vol\n"
             << fmt::format("forward-start,{},{},{},{:.12g},{:.10g},{}\n", a.ratio, format_tenor(t_u),
                            format_tenor(t_v), price, price / doc.base * 1e4, vol);
    } else {
        throw ParameterError("unknown product '" + a.product + "'");
    }
    if (!a.csv.empty()) io::write_file(a.csv, line.str());
    std::cout << line.str();
    return 0;
}

struct SkewArgs {
    std::string structure;
    std::string diff;
    std::string tenor = "3m";
    std::string terms = "0,3m,6m,9m,1y,2y";
    std::string moneyness = "0.85,0.90,0.95,1.00,1.05,1.10,1.15";
    std::string out = "skew.csv";
    bool extend = false;
};

int run_skew(const SkewArgs& a, const Common& c) {
    const double tenor = parse_tenor(a.tenor);
    const auto terms = parse_tenor_list(a.terms);
    const auto money = parse_number_list(a.moneyness);
    const double horizon = *std::max_element(terms.begin(), terms.end()) + tenor;
    const auto cfg = c.inversion();

    const auto doc = load_structure(a.structure, a.extend, horizon);
    const auto& ts = doc.term_structure;
    const auto skew = forward_skew(ts, tenor, terms, money, std::log(doc.base), ts.v0(), cfg);

    std::string text;
    if (a.diff.empty()) {
        text = io::format_grid(io::skew_table(skew, skew.vols), 10);
    } else {
        const auto other = load_structure(a.diff, a.extend, horizon);
        const auto& ots = other.term_structure;
        const auto base = forward_skew(ots, tenor, terms, money, std::log(other.base), ots.v0(), cfg);
        // Both price grids are in units of their own base; report bp of it.
        const Eigen::MatrixXd diff_bp = (skew.prices - base.prices) * 1e4;
        text = io::format_grid(io::skew_table(skew, diff_bp), 10);
    }
    io::write_file(a.out, text);
    std::cout << text;
    return 0;
}

struct CheckArgs {
    std::string structure;
    std::size_t mc_paths = 0;
    double mc_dt = 1.0 / 365.0;
    std::string scheme = "euler_full_truncation";
};

int run_check(const CheckArgs& a, const Common& c) {
    const auto doc = load_structure(a.structure, false, 0.0);
    const auto& ts = doc.term_structure;
    const double x0 = std::log(doc.base);
    const auto cfg = c.inversion();

    std::cout << "period,end,two_kappa_theta_minus_sigma2,feller\n";
    for (const auto& p : ts.periods()) {
        const auto& q = p.params;
        std::cout << fmt::format("{},{},{:.6g},{}\n", &p - ts.periods().data() + 1, format_tenor(p.end_time),
                                 2.0 * q.kappa * q.theta - q.sigma * q.sigma, q.feller() ? "yes" : "no");
    }

    std::cout << "\nmaturity,phi0_residual,martingale_residual\n";
    for (const auto& p : ts.periods()) {
        const double t = p.end_time;
        const double phi0 = std::abs(marginal_cf(ts, t, 0.0, x0) - 1.0);
        // With zero drift E[e^{x_t}] = e^{x0}; otherwise compare with the drift accumulated so far.
        double drift = 0.0;
        double prev = 0.0;
        for (const auto& q : ts.periods()) {
            drift += q.params.mu * (std::min(q.end_time, t) - prev);
            prev = q.end_time;
            if (q.end_time >= t) break;
        }
        const Complex m = marginal_cf(ts, t, -kI, x0);
        const double mart = std::abs(m / std::exp(x0 + drift) - 1.0);
        std::cout << fmt::format("{},{:.3e},{:.3e}\n", format_tenor(t), phi0, mart);
    }

    if (a.mc_paths > 0) {
        McConfig mc;
        mc.n_paths = a.mc_paths;
        mc.dt = a.mc_dt;
        mc.scheme = parse_scheme(a.scheme);
        mc.seed = c.seed;
        mc.threads = c.threads;
        std::cout << "\nmaturity,analytic_atm_call,mc_price,mc_se,z_score\n";
        for (const auto& p : ts.periods()) {
            const double t = p.end_time;
            const double fwd = doc.base * forward_growth(ts, t, ts.v0());
            const VanillaSpec spec{fwd, t, true, 1.0};
            const double analytic = vanilla_price(ts, spec, x0, ts.v0(), cfg);
            const auto est = mc_vanilla_price(ts, spec, x0, mc);
            std::cout << fmt::format("{},{:.8g},{:.8g},{:.3g},{:.3f}\n", format_tenor(t), analytic, est.mean,
                                     est.standard_error, (est.mean - analytic) / est.standard_error);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heston term-structure pricing and calibration"};
    app.require_subcommand(1);

    Common common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--abs-tol", common.abs_tol, "absolute tolerance of the inversion probabilities");
        sub->add_option("--threads", common.threads, "worker threads for Monte Carlo")->check(CLI::PositiveNumber);
        sub->add_option("--seed", common.seed, "random seed");
    };

    CalibrateArgs cal;
    auto* calibrate = app.add_subcommand("calibrate", "bootstrap a term structure to a volatility surface");
    calibrate->add_option("--surface", cal.surface, "surface CSV (moneyness rows, tenor columns, vols in %)")->required();
    calibrate->add_option("--forwards", cal.forwards, "forwards CSV (tenor row, forward row)")->required();
    calibrate->add_option("--spot", cal.spot, "spot price (overrides the surface corner cell)");
    calibrate->add_option("--bounds", cal.bounds, "constrained, unconstrained or a JSON file");
    calibrate->add_option("--weights", cal.weights, "weights by distance from the money, comma separated");
    calibrate->add_option("--out-dir", cal.out_dir, "output directory");
    calibrate->add_option("--restarts", cal.restarts, "jittered simplex restarts per period");
    calibrate->add_option("--max-error-bp", cal.max_error_bp, "warn about periods above this error");
    add_common(calibrate);

    PriceArgs pr;
    auto* price = app.add_subcommand("price", "price vanilla or forward-start options");
    price->add_option("--term-structure", pr.structure, "term structure JSON")->required();
    price->add_option("--product", pr.product, "vanilla or forward-start");
    price->add_option("--strike", pr.strike, "vanilla strike");
    price->add_option("--maturity", pr.maturity, "vanilla maturity (1y, 3m or years)");
    price->add_flag("--put", pr.put, "price a put instead of a call");
    price->add_option("--discount", pr.discount, "discount factor to the payment date");
    price->add_option("--ratio", pr.ratio, "forward-start strike ratio");
    price->add_option("--fix", pr.fix, "forward-start fixing time");
    price->add_option("--expiry", pr.expiry, "forward-start expiry");
    price->add_option("--surface", pr.surface, "batch mode: price every quote of this surface");
    price->add_option("--forwards", pr.forwards, "batch mode: forwards CSV");
    price->add_option("--spot", pr.spot, "batch mode: spot override");
    price->add_option("--csv", pr.csv, "also write the output to this CSV");
    price->add_flag("--extend", pr.extend, "stretch the last period to reach the maturity");
    add_common(price);

    SkewArgs sk;
    auto* skew = app.add_subcommand("forward-skew", "forward-start implied volatility surface");
    skew->add_option("--term-structure", sk.structure, "term structure JSON")->required();
    skew->add_option("--diff", sk.diff, "second structure; output becomes the price difference in bp");
    skew->add_option("--tenor", sk.tenor, "option tenor t_v - t_u");
    skew->add_option("--forward-terms", sk.terms, "comma separated fixing times");
    skew->add_option("--moneyness", sk.moneyness, "comma separated strike ratios");
    skew->add_option("--out", sk.out, "output CSV");
    skew->add_flag("--extend", sk.extend, "stretch the last period to reach the grid");
    add_common(skew);

    CheckArgs ck;
    auto* check = app.add_subcommand("check", "Feller status, normalisation and martingale residuals");
    check->add_option("--term-structure", ck.structure, "term structure JSON")->required();
    check->add_option("--mc-paths", ck.mc_paths, "paths for an optional Monte Carlo comparison");
    check->add_option("--mc-dt", ck.mc_dt, "Monte Carlo time step in years");
    check->add_option("--scheme", ck.scheme, "euler_full_truncation or euler_absorbing");
    add_common(check);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*calibrate) return run_calibrate(cal, common);
        if (*price) return run_price(pr, common);
        if (*skew) return run_skew(sk, common);
        if (*check) return run_check(ck, common);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
