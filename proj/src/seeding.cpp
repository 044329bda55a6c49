#include "lobeseg/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "lobeseg/morphology.hpp"

namespace lobeseg {

std::string_view lobe_name(LobeId id) noexcept {
  switch (id) {
    case LobeId::LU: return "LU";
    case LobeId::LL: return "LL";
    case LobeId::RU: return "RU";
    case LobeId::RM: return "RM";
    case LobeId::RL: return "RL";
  }
  return "?";
}

SeedSet::SeedSet(GridMeta meta, std::array<VoxelList, 5> regions, int erosion_iterations)
    : meta_(meta), regions_(std::move(regions)), erosion_iterations_(erosion_iterations) {
  std::vector<std::uint8_t> owner(meta_.voxel_count(), 0);
  for (std::size_t k = 0; k < regions_.size(); ++k) {
    auto& r = regions_[k];
    if (r.empty()) throw InvalidArgument("seed region " + std::to_string(k + 1) + " is empty");
    std::sort(r.begin(), r.end());
    for (std::size_t i : r) {
      if (i >= owner.size()) throw InvalidArgument("seed voxel index out of range");
      if (owner[i] != 0) throw InvalidArgument("seed regions overlap at voxel " + std::to_string(i));
      owner[i] = static_cast<std::uint8_t>(k + 1);
    }
  }
}

LabelVolume SeedSet::to_labels() const {
  LabelVolume out(meta_, 0);
  for (LobeId id : kAllLobes)
    for (std::size_t i : region(id)) out[i] = lobe_label(id);
  return out;
}

void SeedingConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (max_erosions < 1) throw InvalidArgument("max_erosions must be positive");
  if (min_seed_voxels < 1) throw InvalidArgument("min_seed_voxels must be positive");
}

MaskVolume boundary_mask(const ScalarVolume& prob, const MaskVolume& lung, double theta) {
  require_same_grid(prob.meta(), lung.meta(), "probability vs lung");
  MaskVolume out(lung.meta(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (lung[i] && prob[i] >= theta) ? 1 : 0;
  return out;
}

MaskVolume interior_mask(const MaskVolume& boundary, const MaskVolume& lung) {
  require_same_grid(boundary.meta(), lung.meta(), "boundary vs lung");
  MaskVolume out(lung.meta(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (lung[i] && !boundary[i]) ? 1 : 0;
  return out;
}

ErodedRegions erode_to_regions(const MaskVolume& interior, const SeedingConfig& cfg,
                               int target_count) {
  cfg.validate();
  int best_count = 0;
  MaskVolume current = interior;
  for (int n = 0; n <= cfg.max_erosions; ++n) {
    if (n > 0) current = erode(current, Connectivity::Face6);
    Components comps = connected_components(current, Connectivity::Face6);
    if (comps.count == 0) throw SeedCountNeverFive(n, best_count);

    // Sizes are descending, so qualifying components form a prefix.
    const auto qualifying = static_cast<int>(
        std::count_if(comps.sizes.begin(), comps.sizes.end(),
                      [&](std::size_t s) { return s >= cfg.min_seed_voxels; }));
    if (std::abs(qualifying - target_count) < std::abs(best_count - target_count)) {
      best_count = qualifying;
    }
    if (qualifying == target_count) {
      auto voxels = component_voxels(comps);
      voxels.resize(static_cast<std::size_t>(target_count));
      return {std::move(voxels), n};
    }
  }
  throw SeedCountNeverFive(cfg.max_erosions, best_count);
}

std::array<VoxelList, 5> identify_lobes(const std::vector<VoxelList>& regions,
                                        const MaskVolume& lung) {
  if (regions.size() != 5) throw InvalidArgument("identify_lobes needs exactly five regions");
  for (const auto& r : regions) {
    if (r.empty()) throw InvalidArgument("identify_lobes received an empty region");
  }

  const GridMeta& meta = lung.meta();
  Components halves = connected_components(lung, Connectivity::Face6);
  if (halves.count < 2) {
    throw LungPartitionError("lung mask has " + std::to_string(halves.count) +
                             " component(s); two lung halves are required");
  }
  const double x1 = centroid(halves.map, 1)[0];
  const double x2 = centroid(halves.map, 2)[0];
  if (x1 == x2) throw LungPartitionError("lung halves share the same centroid x");
  const std::uint32_t left_label = x1 > x2 ? 1 : 2;
  const std::uint32_t right_label = x1 > x2 ? 2 : 1;

  struct Placed {
    std::size_t region;
    double z;
  };
  std::vector<Placed> left, right;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::size_t on_left = 0, on_right = 0;
    for (std::size_t i : regions[r]) {
      if (halves.map[i] == left_label) ++on_left;
      else if (halves.map[i] == right_label) ++on_right;
    }
    if (on_left == on_right) {
      throw LungPartitionError("seed region " + std::to_string(r + 1) +
                               " straddles both lung halves equally");
    }
    const double z = centroid(meta, regions[r])[2];
    (on_left > on_right ? left : right).push_back({r, z});
  }
  if (left.size() != 2 || right.size() != 3) {
    throw LungPartitionError("expected 2 seed regions in the left lung and 3 in the right, got " +
                             std::to_string(left.size()) + "/" + std::to_string(right.size()));
  }

  auto by_z_desc = [](const Placed& a, const Placed& b) { return a.z > b.z; };
  std::stable_sort(left.begin(), left.end(), by_z_desc);
  std::stable_sort(right.begin(), right.end(), by_z_desc);

  std::array<VoxelList, 5> out;
  out[lobe_index(LobeId::LU)] = regions[left[0].region];
  out[lobe_index(LobeId::LL)] = regions[left[1].region];
  out[lobe_index(LobeId::RU)] = regions[right[0].region];
  out[lobe_index(LobeId::RM)] = regions[right[1].region];
  out[lobe_index(LobeId::RL)] = regions[right[2].region];
  return out;
}

SeedSet generate_seeds(const MaskVolume& interior, const MaskVolume& lung,
                       const SeedingConfig& cfg) {
  require_same_grid(interior.meta(), lung.meta(), "interior vs lung");
  for (std::size_t i = 0; i < interior.size(); ++i) {
    if (interior[i] && !lung[i]) {
      throw InvalidArgument("interior mask extends outside the lung at voxel " + std::to_string(i));
    }
  }
  ErodedRegions eroded = erode_to_regions(interior, cfg, 5);
  return SeedSet(lung.meta(), identify_lobes(eroded.regions, lung), eroded.iterations);
}

SeedSet seeds_from_probability(const ScalarVolume& prob, const MaskVolume& lung,
                               const SeedingConfig& cfg) {
  cfg.validate();
  const MaskVolume boundary = boundary_mask(prob, lung, cfg.theta);
  return generate_seeds(interior_mask(boundary, lung), lung, cfg);
}

}  // namespace lobeseg
