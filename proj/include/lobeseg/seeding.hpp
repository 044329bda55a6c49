#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "lobeseg/volume.hpp"

namespace lobeseg {

/// Lobe identities; the values are the label codes used in LabelVolume.
enum class LobeId : std::uint8_t { LU = 1, LL = 2, RU = 3, RM = 4, RL = 5 };

inline constexpr std::array<LobeId, 5> kAllLobes = {LobeId::LU, LobeId::LL, LobeId::RU,
                                                    LobeId::RM, LobeId::RL};

constexpr std::size_t lobe_index(LobeId id) noexcept { return static_cast<std::size_t>(id) - 1; }
constexpr std::uint8_t lobe_label(LobeId id) noexcept { return static_cast<std::uint8_t>(id); }
std::string_view lobe_name(LobeId id) noexcept;

using VoxelList = std::vector<std::size_t>;

/// Five disjoint, nonempty seed regions, one per lobe.
class SeedSet {
 public:
  /// Throws InvalidArgument if a region is empty, out of range, or overlaps
  /// another. Regions are stored sorted.
  SeedSet(GridMeta meta, std::array<VoxelList, 5> regions, int erosion_iterations = 0);

  const GridMeta& meta() const noexcept { return meta_; }
  const VoxelList& region(LobeId id) const noexcept { return regions_[lobe_index(id)]; }
  const std::array<VoxelList, 5>& regions() const noexcept { return regions_; }
  int erosion_iterations() const noexcept { return erosion_iterations_; }

  /// Seed voxels carry their lobe label, everything else 0.
  LabelVolume to_labels() const;

 private:
  GridMeta meta_;
  std::array<VoxelList, 5> regions_;
  int erosion_iterations_;
};

struct SeedingConfig {
  double theta = 0.5;
  int max_erosions = 64;
  std::size_t min_seed_voxels = 50;

  void validate() const;
};

/// lung AND prob >= theta.
MaskVolume boundary_mask(const ScalarVolume& prob, const MaskVolume& lung, double theta);

/// lung AND NOT boundary.
MaskVolume interior_mask(const MaskVolume& boundary, const MaskVolume& lung);

struct ErodedRegions {
  std::vector<VoxelList> regions;  ///< largest first
  int iterations = 0;
};

/// Erodes `interior` (Face6) until its components of at least
/// `cfg.min_seed_voxels` voxels number exactly `target_count`, and returns
/// them. Smaller components are ignored. Throws SeedCountNeverFive when
/// `cfg.max_erosions` erosions pass or the mask empties first; its
/// best_count is the qualifying count seen closest to the target.
ErodedRegions erode_to_regions(const MaskVolume& interior, const SeedingConfig& cfg,
                               int target_count);

/// Assigns five regions to lobes. The two largest Face6 components of the
/// lung are its halves; the one with larger centroid x is the patient's left.
/// Each region goes to the half holding most of its voxels; the left half
/// must receive two (LU above LL by centroid z), the right three (RU, RM,
/// RL by descending z). Throws LungPartitionError otherwise.
std::array<VoxelList, 5> identify_lobes(const std::vector<VoxelList>& regions,
                                        const MaskVolume& lung);

/// Iterative-erosion seeding on an interior mask (must lie within `lung`).
SeedSet generate_seeds(const MaskVolume& interior, const MaskVolume& lung,
                       const SeedingConfig& cfg = {});

/// Threshold, invert and seed in one step.
SeedSet seeds_from_probability(const ScalarVolume& prob, const MaskVolume& lung,
                               const SeedingConfig& cfg = {});

}  // namespace lobeseg
