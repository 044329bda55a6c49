#include "lobeseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "lobeseg/morphology.hpp"

namespace lobeseg {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::size_t index(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

void PhantomConfig::validate() const {
  for (std::size_t d : dims) {
    if (d < 32) throw DimsTooSmall("phantom dimensions must each be >= 32");
  }
  GridMeta(dims, spacing);  // spacing checks
  if (!(ridge_sigma > 0.0)) throw InvalidArgument("ridge_sigma must be positive");
  if (!(gap_frac >= 0.0 && gap_frac <= 1.0)) throw InvalidArgument("gap_frac must lie in [0, 1]");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be >= 0");
}

PhantomGeometry::PhantomGeometry(const PhantomConfig& cfg) {
  for (int a = 0; a < 3; ++a) extent_[a] = static_cast<double>(cfg.dims[a] - 1) * cfg.spacing[a];
  const auto& e = extent_;
  right_center_ = {0.27 * e[0], 0.5 * e[1], 0.5 * e[2]};
  left_center_ = {0.73 * e[0], 0.5 * e[1], 0.5 * e[2]};
  radii_ = {0.21 * e[0], 0.38 * e[1], 0.44 * e[2]};
}

PhantomGeometry::Side PhantomGeometry::side_at(double x, double y, double z) const noexcept {
  auto inside = [&](const std::array<double, 3>& c) {
    const double u = (x - c[0]) / radii_[0], v = (y - c[1]) / radii_[1], w = (z - c[2]) / radii_[2];
    return u * u + v * v + w * w <= 1.0;
  };
  if (inside(left_center_)) return Side::Left;
  if (inside(right_center_)) return Side::Right;
  return Side::None;
}

double PhantomGeometry::ripple(double x, double y, double cx) const noexcept {
  const double amp = 0.03 * extent_[2];
  const double tau = 2.0 * std::numbers::pi;
  return amp * std::sin(tau * (x - cx) / (0.4 * extent_[0])) +
         amp * std::sin(tau * (y - 0.5 * extent_[1]) / (0.6 * extent_[1]));
}

double PhantomGeometry::surface_offset(int surface, double x, double y, double z) const noexcept {
  const double cy = 0.5 * extent_[1], cz = 0.5 * extent_[2];
  double h = 0.0;
  switch (surface) {
    case 0:  // left oblique
      h = cz + 0.35 * (y - cy) + ripple(x, y, left_center_[0]);
      break;
    case 1:  // right horizontal
      h = cz + 0.16 * extent_[2] + 0.15 * (y - cy) + ripple(x, y, right_center_[0]);
      break;
    default:  // right oblique
      h = cz - 0.14 * extent_[2] + 0.35 * (y - cy) + ripple(x, y, right_center_[0]);
      break;
  }
  return z - h;
}

std::uint8_t PhantomGeometry::label_at(double x, double y, double z) const noexcept {
  switch (side_at(x, y, z)) {
    case Side::Left:
      return surface_offset(0, x, y, z) > 0.0 ? 1 : 2;
    case Side::Right:
      if (surface_offset(1, x, y, z) > 0.0) return 3;
      return surface_offset(2, x, y, z) > 0.0 ? 4 : 5;
    case Side::None:
      break;
  }
  return 0;
}

namespace {

// Distance (mm) from each voxel center to the nearest face between two
// face-adjacent in-lung voxels with different labels. Face midpoints sit on
// the odd lattice points of a half-spacing grid, so an exact transform on
// that grid sampled at even points gives the answer.
ScalarVolume interface_distance(const LabelVolume& gt) {
  const GridMeta& m = gt.meta();
  const Index3 fine_dims{2 * m.nx() - 1, 2 * m.ny() - 1, 2 * m.nz() - 1};
  const auto& sp = m.spacing();
  const GridMeta fine(fine_dims, {0.5 * sp[0], 0.5 * sp[1], 0.5 * sp[2]});
  MaskVolume faces(fine, 0);
  bool any = false;
  for (std::size_t z = 0; z < m.nz(); ++z)
    for (std::size_t y = 0; y < m.ny(); ++y)
      for (std::size_t x = 0; x < m.nx(); ++x) {
        const std::uint8_t a = gt.at(x, y, z);
        if (a == 0) continue;
        const Index3 c{x, y, z};
        for (int axis = 0; axis < 3; ++axis) {
          Index3 n = c;
          if (++n[axis] >= m.dims()[axis]) continue;
          const std::uint8_t b = gt.at(n[0], n[1], n[2]);
          if (b == 0 || b == a) continue;
          Index3 f{2 * x, 2 * y, 2 * z};
          f[axis] += 1;
          faces.at(f[0], f[1], f[2]) = 1;
          any = true;
        }
      }
  ScalarVolume out(m, std::numeric_limits<double>::infinity());
  if (!any) return out;
  const ScalarVolume fine_dist = distance_transform(faces);
  for (std::size_t z = 0; z < m.nz(); ++z)
    for (std::size_t y = 0; y < m.ny(); ++y)
      for (std::size_t x = 0; x < m.nx(); ++x) out.at(x, y, z) = fine_dist.at(2 * x, 2 * y, 2 * z);
  return out;
}

}  // namespace

PhantomCase generate_phantom(const PhantomConfig& cfg) {
  cfg.validate();
  const GridMeta meta(cfg.dims, cfg.spacing);
  const PhantomGeometry geom(cfg);
  const auto& sp = meta.spacing();

  PhantomCase out{ScalarVolume(meta, 0.0), MaskVolume(meta, 0), LabelVolume(meta, 0), 0, 0};
  for (std::size_t i = 0; i < meta.voxel_count(); ++i) {
    const auto c = meta.coords(i);
    const std::uint8_t label = geom.label_at(static_cast<double>(c[0]) * sp[0],
                                             static_cast<double>(c[1]) * sp[1],
                                             static_cast<double>(c[2]) * sp[2]);
    out.gt[i] = label;
    out.lung[i] = label != 0;
  }

  const ScalarVolume dist = interface_distance(out.gt);
  const double two_var = 2.0 * cfg.ridge_sigma * cfg.ridge_sigma;
  const double fissure_reach = 3.0 * cfg.ridge_sigma;

  struct FissureVoxel {
    std::size_t index;
    int surface;
    double x, y;
  };
  std::vector<FissureVoxel> fissure;
  for (std::size_t i = 0; i < meta.voxel_count(); ++i) {
    if (!out.lung[i]) continue;
    const double d = dist[i];
    out.prob[i] = std::exp(-d * d / two_var);
    if (d > fissure_reach) continue;
    const auto c = meta.coords(i);
    const double x = static_cast<double>(c[0]) * sp[0], y = static_cast<double>(c[1]) * sp[1],
                 z = static_cast<double>(c[2]) * sp[2];
    int surface = 0;
    if (out.gt[i] >= 3) {
      surface = std::abs(geom.surface_offset(1, x, y, z)) <= std::abs(geom.surface_offset(2, x, y, z))
                    ? 1
                    : 2;
    }
    fissure.push_back({i, surface, x, y});
  }
  out.fissure_voxel_count = fissure.size();

  Rng rng(cfg.rng_seed);
  const auto target = static_cast<std::size_t>(std::ceil(cfg.gap_frac * static_cast<double>(fissure.size())));
  if (target > 0) {
    std::vector<std::uint8_t> zeroed(fissure.size(), 0);
    std::vector<std::size_t> open(fissure.size());
    for (std::size_t k = 0; k < open.size(); ++k) open[k] = k;
    const double r2 = kGapPatchRadiusMm * kGapPatchRadiusMm;
    while (out.zeroed_voxel_count < target) {
      const FissureVoxel center = fissure[open[rng.index(open.size())]];
      for (std::size_t k = 0; k < fissure.size(); ++k) {
        const auto& f = fissure[k];
        if (zeroed[k] || f.surface != center.surface) continue;
        const double dx = f.x - center.x, dy = f.y - center.y;
        if (dx * dx + dy * dy <= r2) {
          zeroed[k] = 1;
          out.prob[f.index] = 0.0;
          ++out.zeroed_voxel_count;
        }
      }
      std::erase_if(open, [&](std::size_t k) { return zeroed[k] != 0; });
    }
  }

  if (cfg.noise_sigma > 0.0) {
    for (std::size_t i = 0; i < meta.voxel_count(); ++i) {
      out.prob[i] = std::clamp(out.prob[i] + cfg.noise_sigma * rng.normal(), 0.0, 1.0);
    }
  }
  return out;
}

}  // namespace lobeseg
