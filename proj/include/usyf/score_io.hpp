#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usyf/borda.hpp"
#include "usyf/metrics.hpp"

namespace usyf {

// Score CSV: one `label,score` line per comparison, label in
// {genuine, impostor}. Scores are printed with enough digits to round-trip.
void write_score_csv(const ScoreSet& scores, const std::string& path);
ScoreSet read_score_csv(const std::string& path);

// Histogram CSV over [-1, 1] with 64 fixed bins:
// bin_lo,bin_hi,genuine_count,impostor_count.
inline constexpr int kHistogramBins = 64;
void write_histogram_csv(const ScoreSet& scores, const std::string& path);

// Plain score list: one number per line; '#' comments and blanks skipped.
std::vector<double> read_score_list(const std::string& path);

// Embeddings file: text header "count dim", then one row of floats per line.
void write_embeddings(const std::vector<std::vector<float>>& embeddings,
                      const std::string& path);
std::vector<std::vector<float>> read_embeddings(const std::string& path);

// Pairs file: `a<TAB>b<TAB>label` per line; a and b are row indices into the
// embeddings file, label 1 = genuine, 0 = impostor.
struct IndexPair {
  std::size_t a;
  std::size_t b;
  bool genuine;
};
void write_pairs(const std::vector<IndexPair>& pairs, const std::string& path);
std::vector<IndexPair> read_pairs(const std::string& path);

// Accuracy table CSV: header `label,<benchmark...>`, one row per
// configuration.
AccuracyTable read_accuracy_table_csv(const std::string& path);
void write_borda_csv(const AccuracyTable& table, const std::vector<double>& counts,
                     const std::string& path);

}  // namespace usyf
