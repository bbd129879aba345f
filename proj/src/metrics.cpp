#include "usyf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "usyf/common.hpp"

namespace usyf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Count of elements >= t (v sorted ascending).
std::size_t count_at_least(const std::vector<double>& v, double t) {
  return v.end() - std::lower_bound(v.begin(), v.end(), t);
}
}  // namespace

void validate_scores(const ScoreSet& scores) {
  require(!scores.genuine.empty(), "score set: genuine list is empty");
  require(!scores.impostor.empty(), "score set: impostor list is empty");
  constexpr double eps = 1e-9;
  for (double s : scores.genuine)
    require(std::isfinite(s) && s >= -1.0 - eps && s <= 1.0 + eps,
            "score set: genuine score outside [-1, 1]");
  for (double s : scores.impostor)
    require(std::isfinite(s) && s >= -1.0 - eps && s <= 1.0 + eps,
            "score set: impostor score outside [-1, 1]");
}

std::vector<RocPoint> roc_sweep(const ScoreSet& scores) {
  validate_scores(scores);
  std::vector<double> genuine = scores.genuine;
  std::vector<double> impostor = scores.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> thresholds;
  thresholds.reserve(genuine.size() + impostor.size() + 2);
  thresholds.push_back(-kInf);
  thresholds.insert(thresholds.end(), genuine.begin(), genuine.end());
  thresholds.insert(thresholds.end(), impostor.begin(), impostor.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(kInf);

  const double ng = static_cast<double>(genuine.size());
  const double ni = static_cast<double>(impostor.size());
  std::vector<RocPoint> sweep;
  sweep.reserve(thresholds.size());
  for (double t : thresholds) {
    const double fmr = static_cast<double>(count_at_least(impostor, t)) / ni;
    const double fnmr = (ng - static_cast<double>(count_at_least(genuine, t))) / ng;
    sweep.push_back({t, fmr, fnmr});
  }
  return sweep;
}

EerResult eer(const ScoreSet& scores) {
  const auto sweep = roc_sweep(scores);
  const RocPoint* best = &sweep.front();
  double best_gap = std::fabs(best->fmr - best->fnmr);
  for (const auto& p : sweep) {
    const double gap = std::fabs(p.fmr - p.fnmr);
    if (gap < best_gap) {  // ties keep the earlier (smaller) threshold
      best_gap = gap;
      best = &p;
    }
  }
  return {0.5 * (best->fmr + best->fnmr), best->threshold};
}

FnmrResult fnmr_at_fmr(const ScoreSet& scores, double fmr_target) {
  require(fmr_target > 0.0 && fmr_target < 1.0, "fnmr_at_fmr: target must be in (0, 1)");
  const auto sweep = roc_sweep(scores);
  // FMR is nonincreasing and FNMR nondecreasing in the threshold, so the
  // smallest feasible threshold carries the lowest FNMR.
  for (const auto& p : sweep) {
    if (p.fmr <= fmr_target) return {p.fnmr, p.threshold};
  }
  // Unreachable: the +inf sentinel always has FMR 0.
  return {1.0, kInf};
}

VerificationReport make_verification_report(const ScoreSet& scores) {
  VerificationReport r{};
  const auto e = eer(scores);
  r.eer = e.eer;
  r.eer_threshold = e.threshold;
  const auto f10 = fnmr_at_fmr(scores, 0.1);
  const auto f100 = fnmr_at_fmr(scores, 0.01);
  const auto f1000 = fnmr_at_fmr(scores, 0.001);
  r.fmr10 = f10.fnmr;
  r.fmr10_threshold = f10.threshold;
  r.fmr100 = f100.fnmr;
  r.fmr100_threshold = f100.threshold;
  r.fmr1000 = f1000.fnmr;
  r.fmr1000_threshold = f1000.threshold;
  return r;
}

namespace {

double accuracy_at(const std::vector<VerificationPair>& pairs, double threshold) {
  std::size_t correct = 0;
  for (const auto& p : pairs) {
    const bool match = p.score >= threshold;
    if (match == p.genuine) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

// Candidate thresholds: midpoints of adjacent sorted scores plus extremes;
// the first (smallest) maximizer wins.
double best_threshold(const std::vector<VerificationPair>& train) {
  std::vector<double> sorted;
  sorted.reserve(train.size());
  for (const auto& p : train) sorted.push_back(p.score);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> candidates;
  candidates.reserve(sorted.size() + 1);
  candidates.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    candidates.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  candidates.push_back(sorted.back() + 1.0);

  double best_t = candidates.front();
  double best_acc = -1.0;
  for (double t : candidates) {
    const double acc = accuracy_at(train, t);
    if (acc > best_acc) {
      best_acc = acc;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace

double tenfold_accuracy(std::span<const VerificationPair> pairs, int folds) {
  require(folds >= 2, "tenfold_accuracy: need at least 2 folds");
  require(!pairs.empty(), "tenfold_accuracy: empty pair list");
  require(pairs.size() % static_cast<std::size_t>(folds) == 0,
          "tenfold_accuracy: pair count not divisible by fold count");
  const std::size_t fold_size = pairs.size() / static_cast<std::size_t>(folds);

  double total = 0.0;
  for (int f = 0; f < folds; ++f) {
    const std::size_t lo = static_cast<std::size_t>(f) * fold_size;
    const std::size_t hi = lo + fold_size;
    std::vector<VerificationPair> train, test;
    train.reserve(pairs.size() - fold_size);
    test.reserve(fold_size);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      (i >= lo && i < hi ? test : train).push_back(pairs[i]);
    }
    total += accuracy_at(test, best_threshold(train));
  }
  return total / folds;
}

}  // namespace usyf
