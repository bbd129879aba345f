#pragma once

#include <vector>

#include "usyf/metrics.hpp"

namespace usyf {

// Identity-leakage summary: how many impostor comparison scores land above
// operating thresholds derived from an anchor score set. rr = scores within
// the generator's authentic training data, rs = authentic-versus-synthetic.
struct LeakageReport {
  double fmr100_threshold;
  double fmr1000_threshold;
  double rr_above_fmr100_pct;
  double rr_above_fmr1000_pct;
  double rs_above_fmr100_pct;
  double rs_above_fmr1000_pct;
};

// Thresholds come from fnmr_at_fmr on the anchor at targets 0.01 and 0.001;
// each percentage is 100 * |{s >= threshold}| / |scores|.
LeakageReport leakage_report(const std::vector<double>& rr_scores,
                             const std::vector<double>& rs_scores,
                             const ScoreSet& anchor);

}  // namespace usyf
