#include "stomod/cli/table.hpp"

#include <fmt/format.h>

namespace stomod::cli {

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(double v) const {
            if (v == 0.0) return "0";  // folds -0 as well
            return fmt::format("{:.12g}", v);
        }
    };
    return std::visit(Visitor{}, cell);
}

std::string render_csv(const Table& table, const std::vector<std::string>& metadata) {
    std::string out;
    for (const auto& line : metadata) out += "# " + line + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_cell(row[i]);
        out += '\n';
    }
    return out;
}

}  // namespace stomod::cli
