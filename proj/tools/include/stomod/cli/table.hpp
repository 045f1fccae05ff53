#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stomod::cli {

using Cell = std::variant<std::string, long long, double>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// 12 significant digits, so identical inputs give identical bytes.
[[nodiscard]] std::string format_cell(const Cell& cell);

/// '#'-prefixed metadata lines, one header row, then the data rows.
[[nodiscard]] std::string render_csv(const Table& table, const std::vector<std::string>& metadata);

}  // namespace stomod::cli
