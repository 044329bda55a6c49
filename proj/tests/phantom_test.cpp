#include <doctest.h>

#include <cmath>

#include "lobeseg/morphology.hpp"
#include "lobeseg/phantom.hpp"

using namespace lobeseg;

namespace {

/// Returns true when voxel i touches a voxel of another lobe across a face.
bool on_interface(const LabelVolume& gt, std::size_t i) {
  const auto& g = gt.meta();
  const auto c = g.coords(i);
  for (int k = 0; k < 3; ++k)
    for (int s : {-1, 1}) {
      const long v = long(c[k]) + s;
      if (v < 0 || v >= long(g.dims()[k])) continue;
      auto n = c;
      n[k] = std::size_t(v);
      const auto l = gt.at(n[0], n[1], n[2]);
      if (l != 0 && l != gt[i]) return true;
    }
  return false;
}

}  // namespace

TEST_CASE("phantom is deterministic for a fixed seed") {
  PhantomConfig cfg;
  cfg.dims = {40, 36, 44};
  cfg.gap_frac = 0.3;
  cfg.noise_sigma = 0.05;
  const PhantomCase a = generate_phantom(cfg), b = generate_phantom(cfg);
  CHECK(a.prob == b.prob);
  CHECK(a.gt == b.gt);
  CHECK(a.zeroed_voxel_count == b.zeroed_voxel_count);
  cfg.rng_seed = 7;
  CHECK_FALSE(generate_phantom(cfg).prob == a.prob);
}

TEST_CASE("phantom partitions two lungs into five lobes") {
  const PhantomCase c = generate_phantom(PhantomConfig{});
  const auto halves = connected_components(c.lung);
  CHECK(halves.count == 2);
  std::array<std::size_t, 5> counts{};
  for (std::size_t i = 0; i < c.gt.size(); ++i) {
    REQUIRE((c.gt[i] != 0) == (c.lung[i] != 0));
    if (c.gt[i]) ++counts[c.gt[i] - 1];
    REQUIRE(c.prob[i] >= 0.0);
    REQUIRE(c.prob[i] <= 1.0);
    if (!c.lung[i]) REQUIRE(c.prob[i] == 0.0);
  }
  for (std::size_t n : counts) CHECK(n > 0);
  // The left lung (larger x) holds LU above LL.
  const auto lu = centroid(c.gt.meta(), component_voxels(connected_components(label_mask(c.gt, 1)))[0]);
  const auto ll = centroid(c.gt.meta(), component_voxels(connected_components(label_mask(c.gt, 2)))[0]);
  const auto ru = centroid(c.gt.meta(), component_voxels(connected_components(label_mask(c.gt, 3)))[0]);
  CHECK(lu[2] > ll[2]);
  CHECK(lu[0] > ru[0]);
  // Each lobe is one solid piece; the rippled fissures may cut off a stray
  // voxel at the pleural surface.
  for (std::uint8_t l = 1; l <= 5; ++l) {
    const auto parts = connected_components(label_mask(c.gt, l));
    CHECK(parts.sizes[0] >= counts[l - 1] - 2);
  }
}

TEST_CASE("interface voxels sit on the ridge") {
  PhantomConfig cfg;
  const PhantomCase c = generate_phantom(cfg);
  const double s = cfg.spacing[0];
  const double bound = std::exp(-0.5 * std::pow(0.5 * s / cfg.ridge_sigma, 2));
  std::size_t faces = 0;
  for (std::size_t i = 0; i < c.gt.size(); ++i) {
    if (!c.gt[i] || !on_interface(c.gt, i)) continue;
    ++faces;
    REQUIRE(c.prob[i] >= bound);
  }
  CHECK(faces > 0);
  CHECK(c.fissure_voxel_count > faces);
  CHECK(c.zeroed_voxel_count == 0);
}

TEST_CASE("gap fraction controls the zeroed share of the fissure") {
  PhantomConfig cfg;
  cfg.gap_frac = 0.5;
  const PhantomCase c = generate_phantom(cfg);
  const double ratio = double(c.zeroed_voxel_count) / double(c.fissure_voxel_count);
  CHECK(ratio >= 0.4);
  CHECK(ratio <= 0.6);
  std::size_t zero_in_lung = 0;
  for (std::size_t i = 0; i < c.prob.size(); ++i) zero_in_lung += c.lung[i] && c.prob[i] == 0.0;
  CHECK(zero_in_lung >= c.zeroed_voxel_count);
}

TEST_CASE("phantom config validation") {
  PhantomConfig cfg;
  cfg.dims = {31, 64, 64};
  CHECK_THROWS_AS(generate_phantom(cfg), DimsTooSmall);
  cfg = {};
  cfg.gap_frac = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.ridge_sigma = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.noise_sigma = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
