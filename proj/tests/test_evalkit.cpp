#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <numeric>
#include <unistd.h>

#include "usyf/borda.hpp"
#include "usyf/common.hpp"
#include "usyf/leakage.hpp"
#include "usyf/metrics.hpp"
#include "usyf/rng.hpp"
#include "usyf/score_io.hpp"

using namespace usyf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Brute-force counterpart of the sweep: direct counting, no sorting tricks.
double bf_fmr(const ScoreSet& s, double t) {
  std::size_t n = 0;
  for (double v : s.impostor)
    if (v >= t) ++n;
  return static_cast<double>(n) / s.impostor.size();
}

double bf_fnmr(const ScoreSet& s, double t) {
  std::size_t n = 0;
  for (double v : s.genuine)
    if (v < t) ++n;
  return static_cast<double>(n) / s.genuine.size();
}

std::vector<double> bf_thresholds(const ScoreSet& s) {
  std::vector<double> t;
  t.push_back(-kInf);
  t.insert(t.end(), s.genuine.begin(), s.genuine.end());
  t.insert(t.end(), s.impostor.begin(), s.impostor.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  t.push_back(kInf);
  return t;
}

EerResult bf_eer(const ScoreSet& s) {
  EerResult best{2.0, 0.0};
  double best_gap = kInf;
  for (double t : bf_thresholds(s)) {
    const double gap = std::fabs(bf_fmr(s, t) - bf_fnmr(s, t));
    if (gap < best_gap) {
      best_gap = gap;
      best = {0.5 * (bf_fmr(s, t) + bf_fnmr(s, t)), t};
    }
  }
  return best;
}

FnmrResult bf_fnmr_at_fmr(const ScoreSet& s, double target) {
  for (double t : bf_thresholds(s))
    if (bf_fmr(s, t) <= target) return {bf_fnmr(s, t), t};
  return {1.0, kInf};
}

ScoreSet random_scores(RngStream& rng, std::size_t ng, std::size_t ni) {
  ScoreSet s;
  for (std::size_t i = 0; i < ng; ++i) s.genuine.push_back(rng.uniform_range(-1.0, 1.0));
  for (std::size_t i = 0; i < ni; ++i) s.impostor.push_back(rng.uniform_range(-1.0, 1.0));
  return s;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("usyf_evalkit_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("roc sweep: separable example and monotonicity") {
  const ScoreSet s{{0.9, 0.8}, {0.1, 0.2}};
  const auto sweep = roc_sweep(s);
  // Some threshold between the populations must be perfect.
  bool perfect = false;
  for (const auto& p : sweep)
    if (p.fmr == 0.0 && p.fnmr == 0.0) perfect = true;
  CHECK(perfect);
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].fmr <= sweep[i - 1].fmr);    // nonincreasing
    CHECK(sweep[i].fnmr >= sweep[i - 1].fnmr);  // nondecreasing
  }
  CHECK_THROWS_AS(roc_sweep(ScoreSet{{}, {0.1}}), ContractError);
}

TEST_CASE("roc sweep: agrees with the counting oracle on random scores") {
  RngStream rng(101);
  const ScoreSet s = random_scores(rng, 50, 50);
  const auto sweep = roc_sweep(s);
  REQUIRE(sweep.size() == bf_thresholds(s).size());
  for (const auto& p : sweep) {
    REQUIRE(p.fmr == bf_fmr(s, p.threshold));
    REQUIRE(p.fnmr == bf_fnmr(s, p.threshold));
  }
}

TEST_CASE("eer: examples") {
  CHECK(eer(ScoreSet{{0.9, 0.8}, {0.1, 0.2}}).eer == 0.0);
  // Identical empirical distributions: chance level.
  const std::vector<double> same = {0.1, 0.4, 0.7};
  CHECK(eer(ScoreSet{same, same}).eer == 0.5);

  const ScoreSet s{{0.9, 0.6, 0.4}, {0.5, 0.3, 0.1}};
  const auto got = eer(s);
  const auto expected = bf_eer(s);
  CHECK(got.eer == expected.eer);
  CHECK(got.threshold == expected.threshold);
}

TEST_CASE("fnmr_at_fmr: examples") {
  const ScoreSet separable{{0.9, 0.8}, {0.1, 0.2}};
  for (double target : {0.1, 0.01, 0.001})
    CHECK(fnmr_at_fmr(separable, target).fnmr == 0.0);

  // All impostor scores equal the maximum genuine score: nothing genuine is
  // strictly above, so FNMR at the tightest targets is 1.
  const ScoreSet tied{{0.2, 0.5, 0.7}, {0.7, 0.7, 0.7, 0.7}};
  const auto r = fnmr_at_fmr(tied, 0.001);
  std::size_t strictly_above = 0;
  for (double g : tied.genuine)
    if (g > 0.7) ++strictly_above;
  CHECK(r.fnmr ==
        1.0 - static_cast<double>(strictly_above) / tied.genuine.size());
}

TEST_CASE("metric oracle equivalence on randomized score sets") {
  RngStream rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t ng = 1 + rng.uniform_int(100);
    const std::size_t ni = 1 + rng.uniform_int(100);
    const ScoreSet s = random_scores(rng, ng, ni);

    const auto e = eer(s);
    const auto be = bf_eer(s);
    REQUIRE(e.eer == be.eer);
    REQUIRE(e.threshold == be.threshold);

    for (double target : {0.1, 0.01, 0.001}) {
      const auto f = fnmr_at_fmr(s, target);
      const auto bf = bf_fnmr_at_fmr(s, target);
      REQUIRE(f.fnmr == bf.fnmr);
      REQUIRE(f.threshold == bf.threshold);
    }

    const auto report = make_verification_report(s);
    REQUIRE(report.fmr10 <= report.fmr100);
    REQUIRE(report.fmr100 <= report.fmr1000);
  }
}

TEST_CASE("fnmr_at_fmr: 10k synthetic scores against the brute-force sweep") {
  RngStream rng(303);
  ScoreSet s;
  for (int i = 0; i < 5000; ++i) {
    s.genuine.push_back(std::clamp(0.5 + 0.2 * rng.normal(), -1.0, 1.0));
    s.impostor.push_back(std::clamp(-0.1 + 0.2 * rng.normal(), -1.0, 1.0));
  }
  for (double target : {0.1, 0.01, 0.001}) {
    const auto f = fnmr_at_fmr(s, target);
    const auto bf = bf_fnmr_at_fmr(s, target);
    CHECK(f.fnmr == bf.fnmr);
    CHECK(f.threshold == bf.threshold);
  }
}

TEST_CASE("tenfold accuracy: separable pairs score 1.0") {
  std::vector<VerificationPair> pairs;
  RngStream rng(404);
  for (int i = 0; i < 300; ++i) {
    pairs.push_back({rng.uniform_range(0.5, 1.0), true});
    pairs.push_back({rng.uniform_range(-1.0, 0.4), false});
  }
  CHECK(tenfold_accuracy(pairs, 10) == 1.0);
}

TEST_CASE("tenfold accuracy: constant scores resolve by the deterministic tie rule") {
  // All scores equal; the best threshold per fold is decided by the fixed
  // candidate order, making the result an exact rational number.
  const std::vector<VerificationPair> pairs = {
      {0.5, true}, {0.5, false}, {0.5, true}, {0.5, true}, {0.5, false}, {0.5, false}};
  const double acc = tenfold_accuracy(pairs, 2);
  CHECK(acc == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("tenfold accuracy: 600-pair fixture equals the grid oracle") {
  RngStream rng(505);
  std::vector<VerificationPair> pairs;
  for (int i = 0; i < 300; ++i) {
    pairs.push_back({std::clamp(0.35 + 0.3 * rng.normal(), -1.0, 1.0), true});
    pairs.push_back({std::clamp(-0.05 + 0.3 * rng.normal(), -1.0, 1.0), false});
  }
  const double got = tenfold_accuracy(pairs, 10);

  // Independent oracle: same protocol, direct counting over the candidate
  // grid (midpoints plus extremes), first maximizer wins.
  const std::size_t fold_size = pairs.size() / 10;
  double total = 0.0;
  for (int f = 0; f < 10; ++f) {
    std::vector<VerificationPair> train, test;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      ((i / fold_size == static_cast<std::size_t>(f)) ? test : train).push_back(pairs[i]);
    std::vector<double> scores;
    for (const auto& p : train) scores.push_back(p.score);
    std::sort(scores.begin(), scores.end());
    std::vector<double> grid = {scores.front() - 1.0};
    for (std::size_t i = 0; i + 1 < scores.size(); ++i)
      grid.push_back(0.5 * (scores[i] + scores[i + 1]));
    grid.push_back(scores.back() + 1.0);
    double best_acc = -1.0, best_t = grid.front();
    for (double t : grid) {
      std::size_t ok = 0;
      for (const auto& p : train)
        if ((p.score >= t) == p.genuine) ++ok;
      const double acc = static_cast<double>(ok) / train.size();
      if (acc > best_acc) {
        best_acc = acc;
        best_t = t;
      }
    }
    std::size_t ok = 0;
    for (const auto& p : test)
      if ((p.score >= best_t) == p.genuine) ++ok;
    total += static_cast<double>(ok) / test.size();
  }
  CHECK(got == doctest::Approx(total / 10.0).epsilon(1e-12));
}

TEST_CASE("tenfold accuracy: indivisible pair count rejected") {
  std::vector<VerificationPair> pairs(25, VerificationPair{0.5, true});
  CHECK_THROWS_AS(tenfold_accuracy(pairs, 10), ContractError);
}

namespace {

AccuracyTable queue_size_table() {
  AccuracyTable t;
  t.row_labels = {"512", "1024", "2048", "4096", "8192", "16384", "32768", "65536"};
  t.column_labels = {"lfw", "agedb30", "cfpfp", "calfw", "cplfw"};
  t.cells = {
      {86.22, 63.43, 74.44, 67.73, 68.53}, {86.55, 62.58, 73.97, 67.87, 67.85},
      {86.25, 63.97, 73.67, 68.63, 68.57}, {86.97, 63.25, 74.84, 68.82, 68.72},
      {86.50, 63.60, 75.30, 68.30, 68.67}, {86.47, 62.72, 73.67, 68.85, 69.07},
      {86.93, 64.15, 74.51, 69.08, 68.80}, {87.02, 63.57, 74.47, 67.87, 68.18}};
  return t;
}

AccuracyTable margin_table() {
  AccuracyTable t;
  t.row_labels = {"0.00", "0.05", "0.10", "0.15", "0.20"};
  t.column_labels = {"lfw", "agedb30", "cfpfp", "calfw", "cplfw"};
  t.cells = {{91.52, 69.30, 78.46, 75.35, 71.93},
             {91.30, 70.37, 78.73, 75.52, 71.58},
             {92.12, 71.08, 78.19, 76.15, 71.95},
             {91.83, 70.78, 78.11, 76.18, 71.50},
             {91.65, 70.75, 77.80, 75.93, 71.37}};
  return t;
}

}  // namespace

TEST_CASE("borda: reproduces the queue-size ranking fixture") {
  const auto counts = borda(queue_size_table(), TieBreak::kLaterWins);
  const std::vector<double> expected = {8, 7, 14, 24, 22, 17, 30, 18};
  CHECK(counts == expected);
}

TEST_CASE("borda: margin fixture matches under the best-equals-n offset") {
  const auto counts = borda(margin_table(), TieBreak::kLaterWins);
  const std::vector<double> published = {12, 13, 22, 17, 11};
  REQUIRE(counts.size() == published.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    CHECK(counts[i] + 5.0 == published[i]);
}

TEST_CASE("borda: single-row table collapses to zero") {
  AccuracyTable t;
  t.cells = {{90.0, 80.0, 70.0}};
  const auto counts = borda(t, TieBreak::kLaterWins);
  REQUIRE(counts.size() == 1);
  CHECK(counts[0] == 0.0);
}

TEST_CASE("borda: matches an independent sort oracle without ties") {
  RngStream rng(606);
  AccuracyTable t;
  t.cells.assign(4, std::vector<double>(3));
  for (auto& row : t.cells)
    for (auto& v : row) v = rng.uniform_range(50.0, 99.0);

  std::vector<double> expected(4, 0.0);
  for (int col = 0; col < 3; ++col) {
    std::vector<std::size_t> order(4);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return t.cells[a][col] > t.cells[b][col];
    });
    for (std::size_t rank = 1; rank <= 4; ++rank)
      expected[order[rank - 1]] += static_cast<double>(4 - rank);
  }
  CHECK(borda(t, TieBreak::kLaterWins) == expected);
  CHECK(borda(t, TieBreak::kEarlierWins) == expected);  // no ties, same result
}

TEST_CASE("borda: column shift invariance and tie-rule differences") {
  const auto base = borda(queue_size_table(), TieBreak::kLaterWins);
  auto shifted_table = queue_size_table();
  for (auto& row : shifted_table.cells) row[2] += 7.5;  // constant per-column shift
  CHECK(borda(shifted_table, TieBreak::kLaterWins) == base);

  // later_wins and earlier_wins may differ only on tie-affected rows
  // (rows 2 and 5 tie on cfpfp; rows 1 and 7 tie on calfw).
  const auto later = borda(queue_size_table(), TieBreak::kLaterWins);
  const auto earlier = borda(queue_size_table(), TieBreak::kEarlierWins);
  const std::vector<std::size_t> tie_rows = {1, 2, 5, 7};
  for (std::size_t r = 0; r < later.size(); ++r) {
    if (std::find(tie_rows.begin(), tie_rows.end(), r) == tie_rows.end())
      CHECK(later[r] == earlier[r]);
  }
  CHECK(later != earlier);

  // The average rule splits contested points evenly.
  const auto avg = borda(queue_size_table(), TieBreak::kAverage);
  double sum_later = 0.0, sum_avg = 0.0;
  for (std::size_t r = 0; r < later.size(); ++r) {
    sum_later += later[r];
    sum_avg += avg[r];
  }
  CHECK(sum_later == sum_avg);  // points mass preserved
}

TEST_CASE("leakage: clean fixtures give zero percentages") {
  ScoreSet anchor;
  RngStream rng(707);
  for (int i = 0; i < 200; ++i) anchor.genuine.push_back(rng.uniform_range(0.7, 0.9));
  for (int i = 0; i < 1000; ++i) anchor.impostor.push_back(rng.uniform_range(-0.5, 0.3));
  const std::vector<double> rr(500, -0.2), rs(500, -0.3);
  const auto report = leakage_report(rr, rs, anchor);
  CHECK(report.rr_above_fmr100_pct == 0.0);
  CHECK(report.rr_above_fmr1000_pct == 0.0);
  CHECK(report.rs_above_fmr100_pct == 0.0);
  CHECK(report.rs_above_fmr1000_pct == 0.0);

  // Feeding the anchor's own impostor scores back: at most 1% sit above the
  // FMR100 threshold by construction.
  const auto self_report = leakage_report(anchor.impostor, anchor.impostor, anchor);
  CHECK(self_report.rs_above_fmr100_pct <= 1.0);
}

TEST_CASE("leakage: planted 3.1% fixture is reported exactly") {
  ScoreSet anchor;
  for (int i = 0; i < 200; ++i) anchor.genuine.push_back(0.9995);
  for (int i = 0; i < 1000; ++i)
    anchor.impostor.push_back(static_cast<double>(i) / 1000.0);
  // Thresholds land exactly on the 10th and 1st largest impostor scores.
  std::vector<double> rs(1000, 0.5), rr(1000, 0.2);
  for (int i = 0; i < 31; ++i) rs[static_cast<std::size_t>(i)] = 0.995;
  const auto report = leakage_report(rr, rs, anchor);
  CHECK(report.fmr100_threshold == 0.990);
  CHECK(report.fmr1000_threshold == 0.999);
  CHECK(report.rs_above_fmr100_pct == 3.1);
  CHECK(report.rs_above_fmr1000_pct == 0.0);
  CHECK(report.rr_above_fmr100_pct == 0.0);

  CHECK_THROWS_AS(leakage_report({}, rs, anchor), ContractError);
}

TEST_CASE("score csv: round trip preserves the multiset") {
  TempDir tmp;
  RngStream rng(808);
  ScoreSet s = random_scores(rng, 37, 41);
  const auto path = tmp.file("scores.csv");
  write_score_csv(s, path);
  const ScoreSet loaded = read_score_csv(path);
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(sorted(loaded.genuine) == sorted(s.genuine));
  CHECK(sorted(loaded.impostor) == sorted(s.impostor));

  // 2 + 2 scores produce exactly 4 data lines (plus header).
  ScoreSet small{{0.1, 0.2}, {-0.1, -0.2}};
  write_score_csv(small, path);
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 5);

  ScoreSet empty_genuine{{}, {0.1}};
  CHECK_THROWS_AS(write_score_csv(empty_genuine, path), ContractError);
}

TEST_CASE("histogram csv: deterministic binning over [-1, 1]") {
  TempDir tmp;
  ScoreSet s{{-1.0, 0.0, 0.999, 1.0}, {-0.5}};
  const auto path = tmp.file("hist.csv");
  write_histogram_csv(s, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "bin_lo,bin_hi,genuine_count,impostor_count");
  long genuine_total = 0, impostor_total = 0;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    const auto c1 = line.rfind(',');
    const auto c2 = line.rfind(',', c1 - 1);
    impostor_total += std::stol(line.substr(c1 + 1));
    genuine_total += std::stol(line.substr(c2 + 1, c1 - c2 - 1));
  }
  CHECK(rows == 64);
  CHECK(genuine_total == 4);
  CHECK(impostor_total == 1);
}

TEST_CASE("accuracy table csv round trip") {
  TempDir tmp;
  const auto path = tmp.file("table.csv");
  {
    std::ofstream out(path);
    out << "label,lfw,agedb30\n";
    out << "run_a,91.5,70.1\n";
    out << "run_b,90.0,71.2\n";
  }
  const auto table = read_accuracy_table_csv(path);
  REQUIRE(table.cells.size() == 2);
  CHECK(table.row_labels[0] == "run_a");
  CHECK(table.column_labels[1] == "agedb30");
  CHECK(table.cells[1][1] == 71.2);

  const auto counts = borda(table, TieBreak::kLaterWins);
  write_borda_csv(table, counts, tmp.file("counts.csv"));
  std::ifstream in(tmp.file("counts.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "label,borda_count");
  std::getline(in, line);
  CHECK(line == "run_a,1");
}
