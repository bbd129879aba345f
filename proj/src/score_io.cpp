#include "usyf/score_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "usyf/common.hpp"

namespace usyf {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return in;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == 0) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(context + ": cannot parse number '" + s + "'");
  }
}

}  // namespace

void write_score_csv(const ScoreSet& scores, const std::string& path) {
  validate_scores(scores);
  auto out = open_out(path);
  out << "label,score\n";
  for (double s : scores.genuine) out << "genuine," << format_double(s) << "\n";
  for (double s : scores.impostor) out << "impostor," << format_double(s) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

ScoreSet read_score_csv(const std::string& path) {
  auto in = open_in(path);
  ScoreSet scores;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    if (first && line.rfind("label,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    const auto fields = split(line, ',');
    if (fields.size() != 2) throw FormatError(path + ": expected label,score per line");
    const double s = parse_double(fields[1], path);
    if (fields[0] == "genuine")
      scores.genuine.push_back(s);
    else if (fields[0] == "impostor")
      scores.impostor.push_back(s);
    else
      throw FormatError(path + ": unknown label '" + fields[0] + "'");
  }
  return scores;
}

void write_histogram_csv(const ScoreSet& scores, const std::string& path) {
  validate_scores(scores);
  std::vector<long> genuine_bins(kHistogramBins, 0), impostor_bins(kHistogramBins, 0);
  auto bin_of = [](double s) {
    int b = static_cast<int>(std::floor((s + 1.0) / 2.0 * kHistogramBins));
    return std::clamp(b, 0, kHistogramBins - 1);
  };
  for (double s : scores.genuine) ++genuine_bins[bin_of(s)];
  for (double s : scores.impostor) ++impostor_bins[bin_of(s)];

  auto out = open_out(path);
  out << "bin_lo,bin_hi,genuine_count,impostor_count\n";
  for (int b = 0; b < kHistogramBins; ++b) {
    const double lo = -1.0 + 2.0 * b / kHistogramBins;
    const double hi = -1.0 + 2.0 * (b + 1) / kHistogramBins;
    out << format_double(lo) << "," << format_double(hi) << "," << genuine_bins[b] << ","
        << impostor_bins[b] << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<double> read_score_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<double> scores;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    scores.push_back(parse_double(line, path));
  }
  return scores;
}

void write_embeddings(const std::vector<std::vector<float>>& embeddings,
                      const std::string& path) {
  require(!embeddings.empty(), "write_embeddings: empty embedding list");
  const std::size_t dim = embeddings.front().size();
  for (const auto& e : embeddings)
    require(e.size() == dim, "write_embeddings: ragged embedding rows");
  auto out = open_out(path);
  out << embeddings.size() << " " << dim << "\n";
  char buf[64];
  for (const auto& e : embeddings) {
    for (std::size_t i = 0; i < dim; ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(e[i]));
      out << buf << (i + 1 < dim ? " " : "\n");
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::vector<float>> read_embeddings(const std::string& path) {
  auto in = open_in(path);
  std::size_t count = 0, dim = 0;
  if (!(in >> count >> dim)) throw FormatError(path + ": bad embeddings header");
  std::vector<std::vector<float>> out(count, std::vector<float>(dim));
  for (auto& row : out)
    for (auto& v : row)
      if (!(in >> v)) throw FormatError(path + ": truncated embeddings payload");
  return out;
}

void write_pairs(const std::vector<IndexPair>& pairs, const std::string& path) {
  auto out = open_out(path);
  for (const auto& p : pairs)
    out << p.a << "\t" << p.b << "\t" << (p.genuine ? 1 : 0) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::vector<IndexPair> read_pairs(const std::string& path) {
  auto in = open_in(path);
  std::vector<IndexPair> pairs;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw FormatError(path + ": expected a<TAB>b<TAB>label");
    IndexPair p{};
    try {
      p.a = std::stoull(fields[0]);
      p.b = std::stoull(fields[1]);
    } catch (const std::exception&) {
      throw FormatError(path + ": bad pair index in '" + line + "'");
    }
    if (fields[2] == "1")
      p.genuine = true;
    else if (fields[2] == "0")
      p.genuine = false;
    else
      throw FormatError(path + ": pair label must be 0 or 1");
    pairs.push_back(p);
  }
  return pairs;
}

AccuracyTable read_accuracy_table_csv(const std::string& path) {
  auto in = open_in(path);
  AccuracyTable table;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (is_blank_or_comment(line)) continue;
    const auto fields = split(line, ',');
    if (fields.size() < 2) throw FormatError(path + ": need label plus >= 1 column");
    if (!header_done) {
      table.column_labels.assign(fields.begin() + 1, fields.end());
      header_done = true;
      continue;
    }
    table.row_labels.push_back(fields[0]);
    std::vector<double> row;
    for (std::size_t i = 1; i < fields.size(); ++i)
      row.push_back(parse_double(fields[i], path));
    table.cells.push_back(std::move(row));
  }
  if (!header_done || table.cells.empty())
    throw FormatError(path + ": empty accuracy table");
  validate_table(table);
  return table;
}

void write_borda_csv(const AccuracyTable& table, const std::vector<double>& counts,
                     const std::string& path) {
  require(counts.size() == table.cells.size(), "write_borda_csv: count/row mismatch");
  auto out = open_out(path);
  out << "label,borda_count\n";
  for (std::size_t r = 0; r < counts.size(); ++r) {
    const std::string label =
        table.row_labels.empty() ? std::to_string(r) : table.row_labels[r];
    // Integer counts print as integers; the average tie rule can yield .5.
    if (counts[r] == std::floor(counts[r]))
      out << label << "," << static_cast<long long>(counts[r]) << "\n";
    else
      out << label << "," << format_double(counts[r]) << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace usyf
