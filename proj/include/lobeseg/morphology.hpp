#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "lobeseg/kernels.hpp"
#include "lobeseg/volume.hpp"

namespace lobeseg {

/// A voxel survives if it and all its `conn` neighbors are true. Neighbors
/// outside the grid count as false.
MaskVolume erode(const MaskVolume& mask, Connectivity conn = Connectivity::Face6);

struct Components {
  ComponentMap map;  ///< 0 outside the mask, 1..count inside
  std::uint32_t count = 0;
  std::vector<std::size_t> sizes;  ///< sizes[k-1] = voxel count of component k
};

/// Components are numbered by decreasing size; equal sizes keep the order of
/// their lowest flat index.
Components connected_components(const MaskVolume& mask, Connectivity conn = Connectivity::Face6);

/// Flat indices of each component, ascending; element k-1 holds component k.
std::vector<std::vector<std::size_t>> component_voxels(const Components& comps);

/// Mean voxel coordinate of `label`. Throws UnknownLabel if absent.
std::array<double, 3> centroid(const ComponentMap& map, std::uint32_t label);
std::array<double, 3> centroid(const GridMeta& meta, const std::vector<std::size_t>& voxels);

/// Exact Euclidean distance (mm) to the nearest true voxel, computed by three
/// separable squared-distance passes. Throws EmptyMask for an all-false mask.
ScalarVolume distance_transform(const MaskVolume& mask);

/// True voxels with at least one Face6 neighbor that is false or off-grid,
/// as ascending flat indices.
std::vector<std::size_t> surface_voxels(const MaskVolume& mask);

MaskVolume mask_from_indices(const GridMeta& meta, const std::vector<std::size_t>& voxels);

}  // namespace lobeseg
