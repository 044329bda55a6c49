#include <doctest.h>

#include <random>

#include "lobeseg/morphology.hpp"
#include "support.hpp"

using namespace lobeseg;
using namespace lobeseg::testing;

TEST_CASE("erosion of a 3x3x3 cube leaves its center") {
  const MaskVolume cube(GridMeta({3, 3, 3}), 1);
  const MaskVolume e = erode(cube);
  CHECK(count_true(e) == 1);
  CHECK(e.at(1, 1, 1) == 1);
  CHECK(count_true(erode(cube, Connectivity::Vertex26)) == 1);
}

TEST_CASE("connected components") {
  MaskVolume m(GridMeta({3, 3, 1}), 0);
  m.at(0, 0, 0) = 1;
  m.at(1, 1, 0) = 1;
  CHECK(connected_components(m, Connectivity::Face6).count == 2);
  CHECK(connected_components(m, Connectivity::Vertex26).count == 1);

  MaskVolume two(GridMeta({5, 1, 1}), 0);
  two[0] = 1;
  two[2] = two[3] = two[4] = 1;
  const auto c = connected_components(two);
  CHECK(c.count == 2);
  CHECK(c.sizes == std::vector<std::size_t>{3, 1});
  CHECK(c.map[4] == 1);
  CHECK(c.map[0] == 2);
  CHECK(component_voxels(c)[0] == std::vector<std::size_t>{2, 3, 4});
}

TEST_CASE("centroids") {
  MaskVolume m(GridMeta({4, 1, 1}), 0);
  m[1] = m[3] = 1;
  const auto c = connected_components(m);
  CHECK(centroid(c.map, 1)[0] == 1.0);
  CHECK(centroid(c.map, 2)[0] == 3.0);
  CHECK_THROWS_AS(centroid(c.map, 3), UnknownLabel);
  CHECK(centroid(m.meta(), {1, 3})[0] == 2.0);
}

TEST_CASE("distance transform values") {
  MaskVolume m(GridMeta({4, 5, 1}), 0);
  m.at(0, 0, 0) = 1;
  CHECK(distance_transform(m).at(3, 4, 0) == doctest::Approx(5.0).epsilon(1e-12));

  MaskVolume a(GridMeta({1, 1, 2}, {1.0, 1.0, 2.0}), 0);
  a[0] = 1;
  CHECK(distance_transform(a)[1] == 2.0);
  CHECK_THROWS_AS(distance_transform(MaskVolume(GridMeta({2, 2, 2}), 0)), EmptyMask);
}

TEST_CASE("surface of a 3x3x3 cube is 26 voxels") {
  const auto s = surface_voxels(MaskVolume(GridMeta({3, 3, 3}), 1));
  CHECK(s.size() == 26);
  CHECK(std::find(s.begin(), s.end(), std::size_t{13}) == s.end());
}

TEST_CASE("erosion, components, distance and surfaces match brute force") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 50; ++t) {
    const GridMeta g = random_meta(rng, 12, t % 2 == 1);
    const MaskVolume m = random_mask(rng, g);
    for (auto conn : {Connectivity::Face6, Connectivity::Vertex26}) {
      CHECK(erode(m, conn) == brute_erode(m, conn));
      const auto comps = connected_components(m, conn);
      CHECK(std::vector<std::uint32_t>(comps.map.data().begin(), comps.map.data().end()) ==
            brute_components(m, conn));
    }
    CHECK(surface_voxels(m) == brute_surface(m));
    if (count_true(m) == 0) continue;
    const auto dt = distance_transform(m);
    const auto ref = brute_distance(m);
    for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(relative_close(dt[i], ref[i], 1e-9));
  }
}

TEST_CASE("erosion is a shrinking, monotone operator") {
  std::mt19937_64 rng(102);
  for (int t = 0; t < 30; ++t) {
    const GridMeta g = random_meta(rng, 10, false);
    const MaskVolume a = random_mask(rng, g);
    MaskVolume b = a;  // b ⊆ a
    for (std::size_t i = 0; i < b.size(); ++i)
      if (uniform(rng, 0, 1) < 0.2) b[i] = 0;
    const MaskVolume ea = erode(a), eb = erode(b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(ea[i] <= a[i]);
      CHECK(eb[i] <= ea[i]);
    }
  }
}
