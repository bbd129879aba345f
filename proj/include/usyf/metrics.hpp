#pragma once

#include <optional>
#include <span>
#include <vector>

namespace usyf {

// Labeled cosine similarity scores feeding all verification metrics.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

void validate_scores(const ScoreSet& scores);

struct RocPoint {
  double threshold;
  double fmr;   // fraction of impostor scores >= threshold
  double fnmr;  // fraction of genuine scores < threshold
};

// Threshold sweep over the sorted distinct observed scores plus -inf/+inf
// sentinels, ascending. A comparison matches iff score >= threshold, so FMR
// is nonincreasing and FNMR nondecreasing along the sweep.
std::vector<RocPoint> roc_sweep(const ScoreSet& scores);

struct EerResult {
  double eer;
  double threshold;
};

// Threshold minimizing |FMR - FNMR| over the sweep (ties toward the smaller
// threshold); the reported EER is the average of the two rates there.
EerResult eer(const ScoreSet& scores);

struct FnmrResult {
  double fnmr;
  double threshold;
};

// Lowest FNMR over thresholds whose FMR is within the target (e.g. 0.1, 0.01,
// 0.001); returns the smallest such threshold.
FnmrResult fnmr_at_fmr(const ScoreSet& scores, double fmr_target);

struct VerificationReport {
  double eer;
  double eer_threshold;
  double fmr10, fmr10_threshold;
  double fmr100, fmr100_threshold;
  double fmr1000, fmr1000_threshold;
  std::optional<double> tenfold_accuracy;
};

VerificationReport make_verification_report(const ScoreSet& scores);

struct VerificationPair {
  double score;
  bool genuine;
};

// Standard 10-fold pair-verification accuracy: contiguous folds; for each
// fold the accept threshold is picked on the other nine folds (candidates are
// midpoints of adjacent sorted training scores plus both extremes, first
// maximizer wins) and accuracy is measured on the held-out fold. Returns the
// mean over folds. The pair count must be divisible by the fold count.
double tenfold_accuracy(std::span<const VerificationPair> pairs, int folds = 10);

}  // namespace usyf
