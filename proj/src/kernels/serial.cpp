#include <algorithm>
#include <array>
#include <limits>

#include "lobeseg/kernels.hpp"

namespace lobeseg::kernels {

namespace {

constexpr std::array<std::array<int, 3>, 6> kFace6 = {{
    {-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}}};

constexpr std::array<std::array<int, 3>, 26> make_vertex26() {
  std::array<std::array<int, 3>, 26> out{};
  std::size_t n = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx != 0 || dy != 0 || dz != 0) out[n++] = {dx, dy, dz};
  return out;
}

constexpr auto kVertex26 = make_vertex26();

}  // namespace

std::span<const std::array<int, 3>> neighbor_offsets(Connectivity conn) {
  if (conn == Connectivity::Face6) return kFace6;
  return kVertex26;
}

void squared_distance_1d(const double* f, double* out, std::size_t n, double spacing,
                         std::size_t* v, double* z) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  auto pos = [spacing](std::size_t i) { return spacing * static_cast<double>(i); };

  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s;
    for (;;) {
      const std::size_t p = v[k];
      s = ((f[q] + pos(q) * pos(q)) - (f[p] + pos(p) * pos(p))) / (2.0 * (pos(q) - pos(p)));
      if (s > z[k]) break;
      --k;  // z[0] is -inf, so k never drops below zero here
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }

  if (k < 0) {
    std::fill(out, out + n, inf);
    return;
  }
  std::size_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[j + 1] < pos(q)) ++j;
    const double d = spacing * (static_cast<double>(q) - static_cast<double>(v[j]));
    out[q] = d * d + f[v[j]];
  }
}

namespace serial {

MaskVolume erode(const MaskVolume& mask, Connectivity conn) {
  const GridMeta& m = mask.meta();
  const auto offsets = neighbor_offsets(conn);
  MaskVolume out(m);
  const auto nx = static_cast<long>(m.nx()), ny = static_cast<long>(m.ny()),
             nz = static_cast<long>(m.nz());
  for (long z = 0; z < nz; ++z)
    for (long y = 0; y < ny; ++y)
      for (long x = 0; x < nx; ++x) {
        if (!mask.at(x, y, z)) continue;
        bool keep = true;
        for (const auto& o : offsets) {
          const long xx = x + o[0], yy = y + o[1], zz = z + o[2];
          if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz ||
              !mask.at(xx, yy, zz)) {
            keep = false;
            break;
          }
        }
        out.at(x, y, z) = keep ? 1 : 0;
      }
  return out;
}

std::vector<double> squared_distance(const MaskVolume& mask) {
  const GridMeta& m = mask.meta();
  const auto& sp = m.spacing();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(m.voxel_count());
  for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = mask[i] ? 0.0 : inf;

  const std::size_t nmax = std::max({m.nx(), m.ny(), m.nz()});
  std::vector<double> line(nmax), result(nmax), zbuf(nmax + 1);
  std::vector<std::size_t> vbuf(nmax);

  const std::size_t strides[3] = {1, m.nx(), m.nx() * m.ny()};
  for (int axis = 0; axis < 3; ++axis) {
    const std::size_t n = m.dims()[axis];
    const std::size_t stride = strides[axis];
    for (std::size_t start = 0; start < dist.size(); ++start) {
      // A line starts wherever the axis coordinate is zero.
      if ((start / stride) % n != 0) continue;
      for (std::size_t i = 0; i < n; ++i) line[i] = dist[start + i * stride];
      squared_distance_1d(line.data(), result.data(), n, sp[axis], vbuf.data(), zbuf.data());
      for (std::size_t i = 0; i < n; ++i) dist[start + i * stride] = result[i];
    }
  }
  return dist;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[r] = acc;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t begin = 0; begin < a.size(); begin += kReductionBlock) {
    const std::size_t end = std::min(a.size(), begin + kReductionBlock);
    double partial = 0.0;
    for (std::size_t i = begin; i < end; ++i) partial += a[i] * b[i];
    total += partial;
  }
  return total;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace serial
}  // namespace lobeseg::kernels
