#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lobeseg/error.hpp"

namespace lobeseg {

using Index3 = std::array<std::size_t, 3>;

/// Grid extents and physical voxel size (mm). Flat storage is x-fastest:
/// index = x + nx * (y + ny * z).
class GridMeta {
 public:
  GridMeta(Index3 dims, std::array<double, 3> spacing);
  explicit GridMeta(Index3 dims) : GridMeta(dims, {1.0, 1.0, 1.0}) {}

  const Index3& dims() const noexcept { return dims_; }
  const std::array<double, 3>& spacing() const noexcept { return spacing_; }
  std::size_t nx() const noexcept { return dims_[0]; }
  std::size_t ny() const noexcept { return dims_[1]; }
  std::size_t nz() const noexcept { return dims_[2]; }
  std::size_t voxel_count() const noexcept { return count_; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_[0] * (y + dims_[1] * z);
  }
  Index3 coords(std::size_t idx) const noexcept {
    return {idx % dims_[0], (idx / dims_[0]) % dims_[1], idx / (dims_[0] * dims_[1])};
  }
  double min_spacing() const noexcept;

  friend bool operator==(const GridMeta&, const GridMeta&) = default;

 private:
  Index3 dims_;
  std::array<double, 3> spacing_;
  std::size_t count_;
};

/// Throws MetaMismatch naming `what` if the grids differ.
void require_same_grid(const GridMeta& a, const GridMeta& b, const char* what);

struct ScalarTag {};
struct MaskTag {};
struct LabelTag {};
struct ComponentTag {};
struct HuTag {};
struct ByteTag {};

/// Dense 3D grid of `T`. `Tag` keeps semantically different volumes with the
/// same element type (masks vs. labels) from mixing.
template <typename T, typename Tag>
class Volume {
 public:
  using value_type = T;

  explicit Volume(GridMeta meta, T fill = T{}) : meta_(meta), data_(meta.voxel_count(), fill) {}

  Volume(GridMeta meta, std::vector<T> data) : meta_(meta), data_(std::move(data)) {
    if (data_.size() != meta_.voxel_count()) {
      throw InvalidArgument("volume data length " + std::to_string(data_.size()) +
                            " does not match grid voxel count " +
                            std::to_string(meta_.voxel_count()));
    }
  }

  const GridMeta& meta() const noexcept { return meta_; }
  std::size_t size() const noexcept { return data_.size(); }

  T operator[](std::size_t i) const noexcept { return data_[i]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  T at(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[meta_.index(x, y, z)];
  }
  T& at(std::size_t x, std::size_t y, std::size_t z) noexcept {
    return data_[meta_.index(x, y, z)];
  }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  GridMeta meta_;
  std::vector<T> data_;
};

using ScalarVolume = Volume<double, ScalarTag>;
/// Boolean grid stored as 0/1 bytes.
using MaskVolume = Volume<std::uint8_t, MaskTag>;
/// 0 = outside lung, 1..5 = LU, LL, RU, RM, RL.
using LabelVolume = Volume<std::uint8_t, LabelTag>;
using ComponentMap = Volume<std::uint32_t, ComponentTag>;
using HuVolume = Volume<std::int16_t, HuTag>;
/// 8-bit intensity image (windowed CT channel).
using ByteVolume = Volume<std::uint8_t, ByteTag>;

inline constexpr std::uint8_t kMaxLabel = 5;

std::size_t count_true(const MaskVolume& mask);

/// Throws InvalidArgument unless every value is in [0, 1].
void validate_probabilities(const ScalarVolume& prob);

/// Throws InvalidLabel if a label exceeds 5, or if `lung` is given and a
/// nonzero label lies outside it.
void validate_labels(const LabelVolume& labels, const MaskVolume* lung = nullptr);

/// Mask of voxels carrying exactly `label`.
MaskVolume label_mask(const LabelVolume& labels, std::uint8_t label);

}  // namespace lobeseg
