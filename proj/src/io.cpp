#include "tdheston/io.hpp"

#include "tdheston/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace tdheston::io {

namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, std::size_t col,
                       const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": " << what;
    throw ParseError(msg.str());
}

double parse_number(const std::string& cell, const std::string& source, std::size_t line,
                    std::size_t col) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &used);
    } catch (const std::exception&) {
        fail(source, line, col, "expected a number, got '" + cell + "'");
    }
    if (used != cell.size()) fail(source, line, col, "expected a number, got '" + cell + "'");
    return value;
}

std::string format_number(double v, int precision) {
    if (std::isnan(v)) return {};
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

}  // namespace

LabelledGrid parse_grid(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    LabelledGrid grid;
    std::vector<std::vector<double>> rows;
    bool have_header = false;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto cells = split(line);
        if (!have_header) {
            if (cells.size() < 2) fail(source, line_no, 1, "header needs at least one column label");
            grid.corner = cells.front();
            grid.col_labels.assign(cells.begin() + 1, cells.end());
            have_header = true;
            continue;
        }
        if (cells.size() != grid.col_labels.size() + 1) {
            fail(source, line_no, 1,
                 "expected " + std::to_string(grid.col_labels.size() + 1) + " cells, got " +
                     std::to_string(cells.size()));
        }
        grid.row_labels.push_back(cells.front());
        std::vector<double> row;
        for (std::size_t c = 1; c < cells.size(); ++c) {
            row.push_back(parse_number(cells[c], source, line_no, c + 1));
        }
        rows.push_back(std::move(row));
    }
    if (!have_header) fail(source, line_no + 1, 1, "empty file");
    grid.values.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(grid.col_labels.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            grid.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return grid;
}

std::string format_grid(const LabelledGrid& grid, int precision) {
    std::ostringstream out;
    out << grid.corner;
    for (const auto& label : grid.col_labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
        out << grid.row_labels[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < grid.values.cols(); ++c) {
            out << ',' << format_number(grid.values(r, c), precision);
        }
        out << '\n';
    }
    return out.str();
}

VolSurface parse_surface(const std::string& text, std::optional<double> spot,
                         const std::string& source) {
    const auto grid = parse_grid(text, source);
    if (grid.row_labels.empty()) fail(source, 2, 1, "surface has no moneyness rows");
    VolSurface s;
    if (spot) {
        s.spot = *spot;
    } else if (grid.corner.rfind("spot=", 0) == 0) {
        s.spot = parse_number(grid.corner.substr(5), source, 1, 1);
    } else {
        fail(source, 1, 1, "spot not given (use a 'spot=<value>' corner cell or --spot)");
    }
    for (std::size_t c = 0; c < grid.col_labels.size(); ++c) {
        try {
            s.tenors.push_back(parse_tenor(grid.col_labels[c]));
        } catch (const ParseError& e) {
            fail(source, 1, c + 2, e.what());
        }
    }
    for (std::size_t r = 0; r < grid.row_labels.size(); ++r) {
        s.moneyness.push_back(parse_number(grid.row_labels[r], source, r + 2, 1));
    }
    if (!grid.values.allFinite()) fail(source, 2, 2, "surface has empty cells");
    s.vols = grid.values / 100.0;
    s.validate();
    return s;
}

ForwardCurve parse_forwards(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string raw;
    std::vector<std::vector<std::string>> lines;
    std::vector<std::size_t> numbers;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        lines.push_back(split(line));
        numbers.push_back(line_no);
    }
    if (lines.size() != 2) fail(source, line_no + 1, 1, "expected a tenor row and a forward row");
    if (lines[0].size() != lines[1].size()) {
        fail(source, numbers[1], 1, "tenor and forward rows differ in length");
    }
    ForwardCurve curve;
    for (std::size_t c = 0; c < lines[0].size(); ++c) {
        try {
            curve.tenors.push_back(parse_tenor(lines[0][c]));
        } catch (const ParseError& e) {
            fail(source, numbers[0], c + 1, e.what());
        }
        const double f = parse_number(lines[1][c], source, numbers[1], c + 1);
        if (std::isnan(f)) fail(source, numbers[1], c + 1, "missing forward");
        curve.forwards.push_back(f);
    }
    curve.validate();
    return curve;
}

nlohmann::json to_json(const TermStructureDocument& doc) {
    nlohmann::json periods = nlohmann::json::array();
    for (const auto& p : doc.term_structure.periods()) {
        periods.push_back({{"end_tenor", format_tenor(p.end_time)},
                           {"end_years", p.end_time},
                           {"kappa", p.params.kappa},
                           {"theta", p.params.theta},
                           {"sigma", p.params.sigma},
                           {"rho", p.params.rho},
                           {"mu", p.params.mu}});
    }
    return {{"spot_or_forward_base", doc.base},
            {"v0", doc.term_structure.v0()},
            {"periods", periods},
            {"metadata", doc.metadata}};
}

TermStructureDocument term_structure_from_json(const nlohmann::json& j) {
    try {
        TermStructureDocument doc;
        doc.base = j.at("spot_or_forward_base").get<double>();
        if (!(doc.base > 0.0)) throw ParseError("spot_or_forward_base must be > 0");
        std::vector<Period> periods;
        for (const auto& p : j.at("periods")) {
            Period period;
            if (p.contains("end_years")) {
                period.end_time = p.at("end_years").get<double>();
            } else {
                period.end_time = parse_tenor(p.at("end_tenor").get<std::string>());
            }
            period.params.kappa = p.at("kappa").get<double>();
            period.params.theta = p.at("theta").get<double>();
            period.params.sigma = p.at("sigma").get<double>();
            period.params.rho = p.at("rho").get<double>();
            period.params.mu = p.value("mu", 0.0);
            periods.push_back(period);
        }
        doc.term_structure = TermStructure(j.at("v0").get<double>(), std::move(periods));
        doc.metadata = j.value("metadata", nlohmann::json::object());
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("term structure document: ") + e.what());
    }
}

LabelledGrid quote_table(const QuoteGrid& quotes, const Eigen::MatrixXd& values) {
    LabelledGrid grid;
    grid.corner = "K \\ Mat";
    for (double t : quotes.tenors) grid.col_labels.push_back(format_tenor(t));
    for (double m : quotes.moneyness) grid.row_labels.push_back(format_number(m, 6));
    grid.values = values;
    return grid;
}

LabelledGrid skew_table(const SkewSurface& skew, const Eigen::MatrixXd& values) {
    LabelledGrid grid;
    grid.corner = "forward_term \\ K";
    for (double m : skew.moneyness) grid.col_labels.push_back(format_number(m, 6));
    for (double t : skew.forward_terms) grid.row_labels.push_back(format_tenor(t));
    grid.values = values;
    return grid;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream content;
    content << in.rdbuf();
    return content.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace tdheston::io
