#include <doctest.h>

#include <limits>

#include "lobeseg/volume.hpp"

using namespace lobeseg;

TEST_CASE("grid meta validates dims and spacing") {
  CHECK_THROWS_AS(GridMeta({0, 4, 4}), InvalidArgument);
  CHECK_THROWS_AS(GridMeta({4, 4, 4}, {1.0, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(GridMeta({4, 4, 4}, {1.0, -1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(GridMeta({4, 4, 4}, {1.0, std::numeric_limits<double>::infinity(), 1.0}),
                  InvalidArgument);
  CHECK_THROWS_AS(GridMeta({1u << 20, 1u << 20, 1u << 20}), InvalidArgument);
}

TEST_CASE("flat index is x-fastest") {
  const GridMeta g({3, 4, 5}, {1.0, 2.0, 0.5});
  CHECK(g.voxel_count() == 60);
  CHECK(g.index(1, 2, 3) == 1 + 3 * (2 + 4 * 3));
  const auto c = g.coords(g.index(2, 3, 4));
  CHECK(c == Index3{2, 3, 4});
  CHECK(g.min_spacing() == 0.5);
}

TEST_CASE("volume length must match grid") {
  CHECK_THROWS_AS(ScalarVolume(GridMeta({2, 2, 2}), std::vector<double>(7)), InvalidArgument);
}

TEST_CASE("grid mismatch is reported") {
  CHECK_THROWS_AS(require_same_grid(GridMeta({2, 2, 2}), GridMeta({2, 2, 3}), "a vs b"),
                  MetaMismatch);
  CHECK_THROWS_AS(
      require_same_grid(GridMeta({2, 2, 2}), GridMeta({2, 2, 2}, {1, 1, 2}), "a vs b"),
      MetaMismatch);
}

TEST_CASE("probability and label validation") {
  ScalarVolume p(GridMeta({2, 1, 1}), 0.5);
  CHECK_NOTHROW(validate_probabilities(p));
  p[1] = 1.5;
  CHECK_THROWS_AS(validate_probabilities(p), InvalidArgument);

  LabelVolume l(GridMeta({2, 1, 1}), 0);
  l[0] = 6;
  CHECK_THROWS_AS(validate_labels(l), InvalidLabel);
  l[0] = 3;
  MaskVolume lung(GridMeta({2, 1, 1}), 0);
  CHECK_THROWS_AS(validate_labels(l, &lung), InvalidLabel);
  lung[0] = 1;
  CHECK_NOTHROW(validate_labels(l, &lung));
  CHECK(count_true(label_mask(l, 3)) == 1);
}
