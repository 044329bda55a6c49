#pragma once

// Data-parallel inner loops. Every kernel exists twice: an OpenMP version in
// `parallel` used by the library, and a plain loop in `serial` kept as the
// reference the tests and benchmarks compare against. Both produce
// bit-identical results for every thread count.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lobeseg/volume.hpp"

namespace lobeseg {

enum class Connectivity { Face6, Vertex26 };

/// Square sparse matrix in compressed-row form.
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;
};

namespace kernels {

/// Dot products and norms are summed over fixed blocks of this many entries,
/// then the block sums are added in order, so the result does not depend on
/// the thread count.
inline constexpr std::size_t kReductionBlock = 4096;

namespace parallel {

MaskVolume erode(const MaskVolume& mask, Connectivity conn);
/// Squared Euclidean distance (mm^2) to the nearest true voxel; +inf when
/// the mask is empty.
std::vector<double> squared_distance(const MaskVolume& mask);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace parallel

namespace serial {

MaskVolume erode(const MaskVolume& mask, Connectivity conn);
std::vector<double> squared_distance(const MaskVolume& mask);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace serial

/// Neighbor offsets for `conn` as (dx, dy, dz) triples.
std::span<const std::array<int, 3>> neighbor_offsets(Connectivity conn);

/// 1D squared distance along one contiguous line:
/// out[q] = min_p (spacing*(q-p))^2 + f[p], via the lower envelope of
/// parabolas. Infinite entries of `f` are skipped. `v` and `z` are scratch
/// buffers of at least n and n+1 entries.
void squared_distance_1d(const double* f, double* out, std::size_t n, double spacing,
                         std::size_t* v, double* z);

}  // namespace kernels
}  // namespace lobeseg
