#pragma once

#include <string>
#include <vector>

namespace usyf {

enum class TieBreak {
  kLaterWins,    // among tied cells the row listed later takes the better rank
  kEarlierWins,  // the row listed earlier takes the better rank
  kAverage,      // tied rows share the mean of the contested points
};

TieBreak tie_break_from_string(const std::string& name);
const char* to_string(TieBreak tie_break);

// Rectangular accuracy table: one row per configuration, one column per
// benchmark.
struct AccuracyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<double>> cells;  // row-major, rows x columns
};

void validate_table(const AccuracyTable& table);

// Per column, rows ranked by accuracy descending earn n - rank points
// (rank 1..n); the result is the per-row sum across columns. Integer-valued
// except under the average tie rule.
std::vector<double> borda(const AccuracyTable& table, TieBreak tie_break);

}  // namespace usyf
