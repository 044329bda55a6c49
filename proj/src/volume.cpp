#include "lobeseg/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lobeseg {

GridMeta::GridMeta(Index3 dims, std::array<double, 3> spacing) : dims_(dims), spacing_(spacing) {
  std::size_t count = 1;
  for (int a = 0; a < 3; ++a) {
    if (dims_[a] == 0) throw InvalidArgument("grid dimensions must be >= 1");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a])) {
      throw InvalidArgument("grid spacing must be positive and finite");
    }
    if (count > std::numeric_limits<std::size_t>::max() / dims_[a]) {
      throw InvalidArgument("grid voxel count overflows the address space");
    }
    count *= dims_[a];
  }
  // Component maps use 32-bit labels and graph nodes 32-bit indices.
  if (count > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("grid voxel count exceeds 2^32 - 1");
  }
  count_ = count;
}

double GridMeta::min_spacing() const noexcept {
  return std::min({spacing_[0], spacing_[1], spacing_[2]});
}

void require_same_grid(const GridMeta& a, const GridMeta& b, const char* what) {
  if (a == b) return;
  auto fmt = [](const GridMeta& m) {
    return std::to_string(m.nx()) + "x" + std::to_string(m.ny()) + "x" + std::to_string(m.nz());
  };
  throw MetaMismatch(std::string(what) + ": grids differ (" + fmt(a) + " vs " + fmt(b) +
                     (a.dims() == b.dims() ? ", spacing differs" : "") + ")");
}

std::size_t count_true(const MaskVolume& mask) {
  return static_cast<std::size_t>(std::count_if(mask.data().begin(), mask.data().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

void validate_probabilities(const ScalarVolume& prob) {
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double p = prob[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InvalidArgument("probability at voxel " + std::to_string(i) + " is outside [0, 1]");
    }
  }
}

void validate_labels(const LabelVolume& labels, const MaskVolume* lung) {
  if (lung) require_same_grid(labels.meta(), lung->meta(), "labels vs lung");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > kMaxLabel) {
      throw InvalidLabel("label " + std::to_string(labels[i]) + " at voxel " + std::to_string(i));
    }
    if (lung && labels[i] != 0 && (*lung)[i] == 0) {
      throw InvalidLabel("nonzero label outside the lung mask at voxel " + std::to_string(i));
    }
  }
}

MaskVolume label_mask(const LabelVolume& labels, std::uint8_t label) {
  MaskVolume out(labels.meta());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == label ? 1 : 0;
  return out;
}

}  // namespace lobeseg
