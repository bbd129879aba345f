#include "usyf/leakage.hpp"

#include "usyf/common.hpp"

namespace usyf {

namespace {
double pct_at_least(const std::vector<double>& scores, double threshold) {
  std::size_t n = 0;
  for (double s : scores)
    if (s >= threshold) ++n;
  return 100.0 * static_cast<double>(n) / static_cast<double>(scores.size());
}
}  // namespace

LeakageReport leakage_report(const std::vector<double>& rr_scores,
                             const std::vector<double>& rs_scores,
                             const ScoreSet& anchor) {
  require(!rr_scores.empty(), "leakage_report: empty R-R score list");
  require(!rs_scores.empty(), "leakage_report: empty R-S score list");
  validate_scores(anchor);

  LeakageReport report{};
  report.fmr100_threshold = fnmr_at_fmr(anchor, 0.01).threshold;
  report.fmr1000_threshold = fnmr_at_fmr(anchor, 0.001).threshold;
  report.rr_above_fmr100_pct = pct_at_least(rr_scores, report.fmr100_threshold);
  report.rr_above_fmr1000_pct = pct_at_least(rr_scores, report.fmr1000_threshold);
  report.rs_above_fmr100_pct = pct_at_least(rs_scores, report.fmr100_threshold);
  report.rs_above_fmr1000_pct = pct_at_least(rs_scores, report.fmr1000_threshold);
  return report;
}

}  // namespace usyf
