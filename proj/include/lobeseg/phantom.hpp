#pragma once

#include <array>
#include <cstdint>

#include "lobeseg/volume.hpp"

namespace lobeseg {

struct PhantomConfig {
  Index3 dims{64, 64, 64};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  double ridge_sigma = 1.5;  ///< mm
  double gap_frac = 0.0;     ///< fraction of fissure voxels removed in disc patches
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

/// Radius (mm) of each disc-shaped fissure gap.
inline constexpr double kGapPatchRadiusMm = 4.0;

/// Analytic layout of the phantom in mm (voxel centers at index * spacing).
/// Two ellipsoidal lungs sit side by side along x; the one at larger x is the
/// patient's left. Each fissure is a height field z = h(x, y): a tilted
/// plane plus a sinusoidal ripple.
class PhantomGeometry {
 public:
  explicit PhantomGeometry(const PhantomConfig& cfg);

  enum class Side { None, Left, Right };
  Side side_at(double x, double y, double z) const noexcept;

  /// 0 outside both lungs, else the lobe label 1..5.
  std::uint8_t label_at(double x, double y, double z) const noexcept;

  /// Fissures: 0 splits LU/LL, 1 splits RU/RM, 2 splits RM/RL. Returns
  /// z - h(x, y), positive above the surface.
  double surface_offset(int surface, double x, double y, double z) const noexcept;

 private:
  double ripple(double x, double y, double cx) const noexcept;

  std::array<double, 3> extent_;
  std::array<double, 3> left_center_, right_center_, radii_;
};

struct PhantomCase {
  ScalarVolume prob;
  MaskVolume lung;
  LabelVolume gt;
  std::size_t fissure_voxel_count = 0;  ///< in-lung voxels within 3 ridge sigmas of an interface
  std::size_t zeroed_voxel_count = 0;   ///< fissure voxels cleared by gap patches
};

/// Boundary probability exp(-d^2 / (2 sigma^2)), with d the mm distance from
/// a voxel center to the nearest face shared by two in-lung voxels of
/// different ground-truth lobes. Gap patches then zero fissure voxels whose
/// (x, y) footprint falls within kGapPatchRadiusMm of a random fissure voxel
/// on the same surface, until gap_frac of them are cleared. Gaussian noise is
/// added last and the result clamped to [0, 1].
///
/// Randomness comes from std::mt19937_64 seeded with rng_seed. Uniform reals
/// use the top 53 bits; normals use Box-Muller (both outputs consumed in
/// order). Voxels are visited in flat-index order.
///
/// Throws DimsTooSmall if any dimension is below 32.
PhantomCase generate_phantom(const PhantomConfig& cfg);

}  // namespace lobeseg
