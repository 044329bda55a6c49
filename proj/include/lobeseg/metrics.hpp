#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "lobeseg/volume.hpp"

namespace lobeseg {

/// |pred ∩ gt| / |pred ∪ gt|, and 1.0 when both are empty.
double jaccard(const MaskVolume& pred, const MaskVolume& gt);

/// Symmetric mean surface distance in mm: every Face6 surface voxel of each
/// mask contributes its exact distance to the other mask's surface, and the
/// sum is divided by the total number of surface voxels. Throws EmptyMask if
/// either mask is empty.
double avg_surface_distance(const MaskVolume& pred, const MaskVolume& gt);

struct LobeScores {
  std::array<double, 5> jaccard{};
  /// 0 when the lobe is absent from both volumes, +inf when it is absent
  /// from exactly one.
  std::array<double, 5> asd_mm{};
  std::array<std::size_t, 5> gt_lobe_voxels{};
  double overall_jaccard = 1.0;
  /// Ground-truth-size-weighted mean of the finite per-lobe ASDs.
  double overall_asd_mm = 0.0;
};

/// Per-lobe scores for labels 1..5; the overall Jaccard weights each lobe by
/// its ground-truth voxel count.
LobeScores lobe_scores(const LabelVolume& pred, const LabelVolume& gt);

struct CumulativeHistogram {
  std::vector<double> thresholds;
  std::vector<double> fractions;
};

/// Fraction of scores <= each of the n_bins right bin edges of [lo, hi].
CumulativeHistogram cumulative_histogram(std::span<const double> scores, std::size_t n_bins,
                                         double lo, double hi);

}  // namespace lobeseg
