#include "lobeseg/metrics.hpp"

#include <cmath>
#include <limits>

#include "lobeseg/morphology.hpp"

namespace lobeseg {

double jaccard(const MaskVolume& pred, const MaskVolume& gt) {
  require_same_grid(pred.meta(), gt.meta(), "jaccard");
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool a = pred[i] != 0, b = gt[i] != 0;
    inter += a && b;
    uni += a || b;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double avg_surface_distance(const MaskVolume& pred, const MaskVolume& gt) {
  require_same_grid(pred.meta(), gt.meta(), "surface distance");
  if (count_true(pred) == 0) throw EmptyMask("predicted mask is empty");
  if (count_true(gt) == 0) throw EmptyMask("ground-truth mask is empty");

  const auto pred_surface = surface_voxels(pred);
  const auto gt_surface = surface_voxels(gt);
  const ScalarVolume to_pred = distance_transform(mask_from_indices(pred.meta(), pred_surface));
  const ScalarVolume to_gt = distance_transform(mask_from_indices(gt.meta(), gt_surface));

  double sum = 0.0;
  for (std::size_t i : pred_surface) sum += to_gt[i];
  for (std::size_t i : gt_surface) sum += to_pred[i];
  return sum / static_cast<double>(pred_surface.size() + gt_surface.size());
}

LobeScores lobe_scores(const LabelVolume& pred, const LabelVolume& gt) {
  require_same_grid(pred.meta(), gt.meta(), "lobe scores");
  validate_labels(pred);
  validate_labels(gt);

  LobeScores out;
  double weighted_j = 0.0, weighted_asd = 0.0;
  std::size_t total = 0, asd_total = 0;
  for (std::uint8_t label = 1; label <= kMaxLabel; ++label) {
    const std::size_t k = label - 1;
    const MaskVolume p = label_mask(pred, label);
    const MaskVolume g = label_mask(gt, label);
    const std::size_t np = count_true(p), ng = count_true(g);
    out.jaccard[k] = jaccard(p, g);
    out.gt_lobe_voxels[k] = ng;
    if (np == 0 && ng == 0) {
      out.asd_mm[k] = 0.0;
    } else if (np == 0 || ng == 0) {
      out.asd_mm[k] = std::numeric_limits<double>::infinity();
    } else {
      out.asd_mm[k] = avg_surface_distance(p, g);
      weighted_asd += static_cast<double>(ng) * out.asd_mm[k];
      asd_total += ng;
    }
    weighted_j += static_cast<double>(ng) * out.jaccard[k];
    total += ng;
  }
  out.overall_jaccard = total ? weighted_j / static_cast<double>(total) : 1.0;
  out.overall_asd_mm = asd_total ? weighted_asd / static_cast<double>(asd_total) : 0.0;
  return out;
}

CumulativeHistogram cumulative_histogram(std::span<const double> scores, std::size_t n_bins,
                                         double lo, double hi) {
  if (scores.empty()) throw EmptyScores("no scores given");
  if (n_bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (!(lo < hi)) throw InvalidArgument("histogram range must satisfy lo < hi");

  CumulativeHistogram out;
  out.thresholds.reserve(n_bins);
  out.fractions.reserve(n_bins);
  const auto bins = static_cast<double>(n_bins);
  for (std::size_t b = 1; b <= n_bins; ++b) {
    const double t = b == n_bins ? hi : lo + (hi - lo) * static_cast<double>(b) / bins;
    std::size_t below = 0;
    for (double s : scores) below += s <= t;
    out.thresholds.push_back(t);
    out.fractions.push_back(static_cast<double>(below) / static_cast<double>(scores.size()));
  }
  return out;
}

}  // namespace lobeseg
