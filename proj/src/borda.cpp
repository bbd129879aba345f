#include "usyf/borda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "usyf/common.hpp"

namespace usyf {

TieBreak tie_break_from_string(const std::string& name) {
  if (name == "later_wins") return TieBreak::kLaterWins;
  if (name == "earlier_wins") return TieBreak::kEarlierWins;
  if (name == "average") return TieBreak::kAverage;
  throw ContractError("unknown tie_break: " + name);
}

const char* to_string(TieBreak tie_break) {
  switch (tie_break) {
    case TieBreak::kLaterWins: return "later_wins";
    case TieBreak::kEarlierWins: return "earlier_wins";
    case TieBreak::kAverage: return "average";
  }
  throw ContractError("unknown tie_break value");
}

void validate_table(const AccuracyTable& table) {
  require(!table.cells.empty(), "accuracy table: no rows");
  const std::size_t cols = table.cells.front().size();
  require(cols >= 1, "accuracy table: no columns");
  for (const auto& row : table.cells)
    require(row.size() == cols, "accuracy table: ragged rows");
  if (!table.row_labels.empty())
    require(table.row_labels.size() == table.cells.size(),
            "accuracy table: row label count mismatch");
  if (!table.column_labels.empty())
    require(table.column_labels.size() == cols,
            "accuracy table: column label count mismatch");
  for (const auto& row : table.cells)
    for (double v : row) require(std::isfinite(v), "accuracy table: non-finite cell");
}

std::vector<double> borda(const AccuracyTable& table, TieBreak tie_break) {
  validate_table(table);
  const std::size_t rows = table.cells.size();
  const std::size_t cols = table.cells.front().size();
  std::vector<double> counts(rows, 0.0);

  std::vector<std::size_t> order(rows);
  for (std::size_t col = 0; col < cols; ++col) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = table.cells[a][col], vb = table.cells[b][col];
      if (va != vb) return va > vb;
      // Tied cells: the preferred row comes first (gets the better rank).
      return tie_break == TieBreak::kLaterWins ? a > b : a < b;
    });
    if (tie_break == TieBreak::kAverage) {
      // Tied groups share the mean of the contested points.
      std::size_t i = 0;
      while (i < rows) {
        std::size_t j = i;
        while (j + 1 < rows &&
               table.cells[order[j + 1]][col] == table.cells[order[i]][col])
          ++j;
        double points = 0.0;
        for (std::size_t r = i; r <= j; ++r)
          points += static_cast<double>(rows - (r + 1));
        const double share = points / static_cast<double>(j - i + 1);
        for (std::size_t r = i; r <= j; ++r) counts[order[r]] += share;
        i = j + 1;
      }
    } else {
      for (std::size_t rank = 1; rank <= rows; ++rank)
        counts[order[rank - 1]] += static_cast<double>(rows - rank);
    }
  }
  return counts;
}

}  // namespace usyf
