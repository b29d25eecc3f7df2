#pragma once

#include "tdheston/calibration.hpp"
#include "tdheston/forward_start.hpp"
#include "tdheston/term_structure.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tdheston::io {

/// A labelled table: header row of column labels, first column of row labels.
/// Empty cells are NaN.
struct LabelledGrid {
    std::string corner;
    std::vector<std::string> col_labels;
    std::vector<std::string> row_labels;
    Eigen::MatrixXd values;
};

LabelledGrid parse_grid(const std::string& text, const std::string& source = "<input>");
std::string format_grid(const LabelledGrid& grid, int precision = 10);

/// Moneyness rows, tenor columns, vols in percent. The corner cell may read
/// "spot=<value>"; `spot` overrides it.
VolSurface parse_surface(const std::string& text, std::optional<double> spot = std::nullopt,
                         const std::string& source = "<surface>");
/// One header row of tenors and one row of forwards.
ForwardCurve parse_forwards(const std::string& text, const std::string& source = "<forwards>");

/// Serialised term structure with its pricing base (F_0^P or spot).
struct TermStructureDocument {
    double base = 0.0;
    TermStructure term_structure;
    nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json to_json(const TermStructureDocument& doc);
TermStructureDocument term_structure_from_json(const nlohmann::json& j);

/// Errors/prices in the calibration-table layout (moneyness rows, tenor columns).
LabelledGrid quote_table(const QuoteGrid& quotes, const Eigen::MatrixXd& values);

/// Forward-term rows, moneyness columns.
LabelledGrid skew_table(const SkewSurface& skew, const Eigen::MatrixXd& values);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace tdheston::io
