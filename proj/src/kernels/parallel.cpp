#include <algorithm>
#include <limits>

#include <omp.h>

#include "lobeseg/kernels.hpp"

namespace lobeseg::kernels::parallel {

MaskVolume erode(const MaskVolume& mask, Connectivity conn) {
  const GridMeta& m = mask.meta();
  const auto offsets = neighbor_offsets(conn);
  MaskVolume out(m);
  const auto nx = static_cast<long>(m.nx()), ny = static_cast<long>(m.ny()),
             nz = static_cast<long>(m.nz());
  const std::uint8_t* in = mask.data().data();
  std::uint8_t* dst = out.data().data();

#pragma omp parallel for collapse(2) schedule(static)
  for (long z = 0; z < nz; ++z)
    for (long y = 0; y < ny; ++y) {
      const long row = nx * (y + ny * z);
      for (long x = 0; x < nx; ++x) {
        if (!in[row + x]) continue;
        bool keep = true;
        for (const auto& o : offsets) {
          const long xx = x + o[0], yy = y + o[1], zz = z + o[2];
          if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz ||
              !in[xx + nx * (yy + ny * zz)]) {
            keep = false;
            break;
          }
        }
        dst[row + x] = keep ? 1 : 0;
      }
    }
  return out;
}

std::vector<double> squared_distance(const MaskVolume& mask) {
  const GridMeta& m = mask.meta();
  const auto& sp = m.spacing();
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t total = m.voxel_count();
  std::vector<double> dist(total);
  double* d = dist.data();
  const std::uint8_t* in = mask.data().data();

#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < total; ++i) d[i] = in[i] ? 0.0 : inf;

  const std::size_t nmax = std::max({m.nx(), m.ny(), m.nz()});
  const std::size_t dims[3] = {m.nx(), m.ny(), m.nz()};
  const std::size_t strides[3] = {1, m.nx(), m.nx() * m.ny()};

  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t n = dims[axis];
    const std::size_t stride = strides[axis];
    // Lines are enumerated by (outer, inner): inner runs over the axes below
    // `axis`, outer over the axes above it.
    const std::size_t inner = stride;
    const std::size_t outer = total / (stride * n);
    const std::size_t lines = inner * outer;

#pragma omp parallel
    {
      std::vector<double> line(nmax), result(nmax), zbuf(nmax + 1);
      std::vector<std::size_t> vbuf(nmax);
#pragma omp for schedule(static)
      for (std::size_t l = 0; l < lines; ++l) {
        const std::size_t start = (l / inner) * stride * n + (l % inner);
        for (std::size_t i = 0; i < n; ++i) line[i] = d[start + i * stride];
        squared_distance_1d(line.data(), result.data(), n, sp[axis], vbuf.data(), zbuf.data());
        for (std::size_t i = 0; i < n; ++i) d[start + i * stride] = result[i];
      }
    }
  }
  return dist;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[r] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t blocks = (a.size() + kReductionBlock - 1) / kReductionBlock;
  if (blocks <= 1) return serial::dot(a, b);
  std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const std::size_t begin = blk * kReductionBlock;
    const std::size_t end = std::min(a.size(), begin + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += a[i] * b[i];
    partial[blk] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace lobeseg::kernels::parallel
