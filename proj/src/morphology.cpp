#include "lobeseg/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lobeseg {

MaskVolume erode(const MaskVolume& mask, Connectivity conn) {
  return kernels::parallel::erode(mask, conn);
}

Components connected_components(const MaskVolume& mask, Connectivity conn) {
  const GridMeta& m = mask.meta();
  const auto offsets = kernels::neighbor_offsets(conn);
  const auto nx = static_cast<long>(m.nx()), ny = static_cast<long>(m.ny()),
             nz = static_cast<long>(m.nz());

  // Flood fill in scan order: provisional labels are ordered by each
  // component's lowest flat index.
  ComponentMap provisional(m, 0);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (!mask[seed] || provisional[seed] != 0) continue;
    const auto label = static_cast<std::uint32_t>(sizes.size() + 1);
    std::size_t size = 0;
    provisional[seed] = label;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++size;
      const auto c = m.coords(cur);
      for (const auto& o : offsets) {
        const long x = static_cast<long>(c[0]) + o[0], y = static_cast<long>(c[1]) + o[1],
                   z = static_cast<long>(c[2]) + o[2];
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) continue;
        const std::size_t nb = m.index(x, y, z);
        if (mask[nb] && provisional[nb] == 0) {
          provisional[nb] = label;
          stack.push_back(nb);
        }
      }
    }
    sizes.push_back(size);
  }

  std::vector<std::uint32_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return sizes[a] > sizes[b]; });
  std::vector<std::uint32_t> relabel(sizes.size() + 1, 0);
  Components out{ComponentMap(m, 0), static_cast<std::uint32_t>(sizes.size()), {}};
  out.sizes.reserve(sizes.size());
  for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
    relabel[order[rank] + 1] = rank + 1;
    out.sizes.push_back(sizes[order[rank]]);
  }
  for (std::size_t i = 0; i < provisional.size(); ++i) out.map[i] = relabel[provisional[i]];
  return out;
}

std::vector<std::vector<std::size_t>> component_voxels(const Components& comps) {
  std::vector<std::vector<std::size_t>> out(comps.count);
  for (std::uint32_t k = 0; k < comps.count; ++k) out[k].reserve(comps.sizes[k]);
  for (std::size_t i = 0; i < comps.map.size(); ++i) {
    if (const auto label = comps.map[i]) out[label - 1].push_back(i);
  }
  return out;
}

std::array<double, 3> centroid(const ComponentMap& map, std::uint32_t label) {
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  std::size_t n = 0;
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i] != label) continue;
    const auto c = map.meta().coords(i);
    for (int a = 0; a < 3; ++a) sum[a] += static_cast<double>(c[a]);
    ++n;
  }
  if (n == 0) throw UnknownLabel("no voxel carries label " + std::to_string(label));
  for (double& s : sum) s /= static_cast<double>(n);
  return sum;
}

std::array<double, 3> centroid(const GridMeta& meta, const std::vector<std::size_t>& voxels) {
  if (voxels.empty()) throw UnknownLabel("centroid of an empty region");
  std::array<double, 3> sum{0.0, 0.0, 0.0};
  for (std::size_t i : voxels) {
    const auto c = meta.coords(i);
    for (int a = 0; a < 3; ++a) sum[a] += static_cast<double>(c[a]);
  }
  for (double& s : sum) s /= static_cast<double>(voxels.size());
  return sum;
}

ScalarVolume distance_transform(const MaskVolume& mask) {
  if (count_true(mask) == 0) throw EmptyMask("distance transform of an empty mask");
  std::vector<double> d = kernels::parallel::squared_distance(mask);
  for (double& v : d) v = std::sqrt(v);
  return ScalarVolume(mask.meta(), std::move(d));
}

std::vector<std::size_t> surface_voxels(const MaskVolume& mask) {
  const GridMeta& m = mask.meta();
  const auto nx = static_cast<long>(m.nx()), ny = static_cast<long>(m.ny()),
             nz = static_cast<long>(m.nz());
  const auto offsets = kernels::neighbor_offsets(Connectivity::Face6);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const auto c = m.coords(i);
    for (const auto& o : offsets) {
      const long x = static_cast<long>(c[0]) + o[0], y = static_cast<long>(c[1]) + o[1],
                 z = static_cast<long>(c[2]) + o[2];
      if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz || !mask.at(x, y, z)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

MaskVolume mask_from_indices(const GridMeta& meta, const std::vector<std::size_t>& voxels) {
  MaskVolume out(meta, 0);
  for (std::size_t i : voxels) out[i] = 1;
  return out;
}

}  // namespace lobeseg
