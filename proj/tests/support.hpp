#pragma once

// Random instance generators and brute-force oracles shared by the unit tests
// and the acceptance runner. The oracles deliberately use the most direct
// formulation (all-pairs distances, union-find, explicit neighbor loops) and
// share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "lobeseg/kernels.hpp"
#include "lobeseg/rw.hpp"
#include "lobeseg/seeding.hpp"
#include "lobeseg/volume.hpp"

namespace lobeseg::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline GridMeta random_meta(std::mt19937_64& rng, std::size_t max_dim, bool anisotropic) {
  Index3 dims{uniform_int(rng, 1, max_dim), uniform_int(rng, 1, max_dim),
              uniform_int(rng, 1, max_dim)};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  if (anisotropic) {
    for (auto& s : spacing) s = uniform(rng, 0.5, 2.5);
  }
  return GridMeta(dims, spacing);
}

/// Blobby random mask: a few random balls plus salt noise.
inline MaskVolume random_mask(std::mt19937_64& rng, const GridMeta& meta) {
  MaskVolume m(meta, 0);
  const int balls = static_cast<int>(uniform_int(rng, 1, 4));
  std::vector<std::array<double, 4>> b;
  for (int i = 0; i < balls; ++i) {
    b.push_back({uniform(rng, 0, double(meta.nx())), uniform(rng, 0, double(meta.ny())),
                 uniform(rng, 0, double(meta.nz())), uniform(rng, 1.0, 5.0)});
  }
  const double salt = uniform(rng, 0.0, 0.15);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto c = meta.coords(i);
    bool on = uniform(rng, 0, 1) < salt;
    for (const auto& s : b) {
      const double dx = double(c[0]) - s[0], dy = double(c[1]) - s[1], dz = double(c[2]) - s[2];
      if (dx * dx + dy * dy + dz * dz <= s[3] * s[3]) on = true;
    }
    m[i] = on ? 1 : 0;
  }
  return m;
}

inline bool is_neighbor_offset(int dx, int dy, int dz, Connectivity conn) {
  const int l1 = std::abs(dx) + std::abs(dy) + std::abs(dz);
  if (l1 == 0) return false;
  return conn == Connectivity::Vertex26 || l1 == 1;
}

inline MaskVolume brute_erode(const MaskVolume& m, Connectivity conn) {
  const auto& g = m.meta();
  MaskVolume out(g, 0);
  for (std::size_t z = 0; z < g.nz(); ++z)
    for (std::size_t y = 0; y < g.ny(); ++y)
      for (std::size_t x = 0; x < g.nx(); ++x) {
        if (!m.at(x, y, z)) continue;
        bool keep = true;
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if (!is_neighbor_offset(dx, dy, dz, conn)) continue;
              const long nx = long(x) + dx, ny = long(y) + dy, nz = long(z) + dz;
              if (nx < 0 || ny < 0 || nz < 0 || nx >= long(g.nx()) || ny >= long(g.ny()) ||
                  nz >= long(g.nz()) || !m.at(nx, ny, nz)) {
                keep = false;
              }
            }
        out.at(x, y, z) = keep ? 1 : 0;
      }
  return out;
}

/// Union-find labeling, numbered by size descending then lowest index.
inline std::vector<std::uint32_t> brute_components(const MaskVolume& m, Connectivity conn) {
  const auto& g = m.meta();
  std::vector<std::size_t> parent(m.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < m.size(); ++a) {
    if (!m[a]) continue;
    for (std::size_t b = a + 1; b < m.size(); ++b) {
      if (!m[b]) continue;
      const auto ca = g.coords(a), cb = g.coords(b);
      const long dx = long(cb[0]) - long(ca[0]), dy = long(cb[1]) - long(ca[1]),
                 dz = long(cb[2]) - long(ca[2]);
      if (std::abs(dx) > 1 || std::abs(dy) > 1 || std::abs(dz) > 1) continue;
      if (!is_neighbor_offset(int(dx), int(dy), int(dz), conn)) continue;
      parent[find(a)] = find(b);
    }
  }
  struct Group {
    std::size_t root, size, first;
  };
  std::vector<Group> groups;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const std::size_t r = find(i);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) { return gr.root == r; });
    if (it == groups.end()) {
      groups.push_back({r, 1, i});
    } else {
      ++it->size;
    }
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.size != b.size ? a.size > b.size : a.first < b.first;
  });
  std::vector<std::uint32_t> labels(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const std::size_t r = find(i);
    for (std::size_t k = 0; k < groups.size(); ++k)
      if (groups[k].root == r) labels[i] = std::uint32_t(k + 1);
  }
  return labels;
}

inline double physical_distance(const GridMeta& g, std::size_t a, std::size_t b) {
  const auto ca = g.coords(a), cb = g.coords(b);
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = (double(ca[k]) - double(cb[k])) * g.spacing()[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// All-pairs distance to the nearest true voxel.
inline std::vector<double> brute_distance(const MaskVolume& m) {
  std::vector<double> out(m.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[j]) out[i] = std::min(out[i], physical_distance(m.meta(), i, j));
  return out;
}

inline std::vector<std::size_t> brute_surface(const MaskVolume& m) {
  const auto& g = m.meta();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const auto c = g.coords(i);
    bool surface = false;
    for (int k = 0; k < 3; ++k)
      for (int s : {-1, 1}) {
        const long v = long(c[k]) + s;
        if (v < 0 || v >= long(g.dims()[k])) {
          surface = true;
          continue;
        }
        auto n = c;
        n[k] = std::size_t(v);
        if (!m.at(n[0], n[1], n[2])) surface = true;
      }
    if (surface) out.push_back(i);
  }
  return out;
}

inline double brute_asd(const MaskVolume& a, const MaskVolume& b) {
  const auto sa = brute_surface(a), sb = brute_surface(b);
  double total = 0.0;
  auto accumulate = [&](const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) {
    for (std::size_t i : from) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j : to) best = std::min(best, physical_distance(a.meta(), i, j));
      total += best;
    }
  };
  accumulate(sa, sb);
  accumulate(sb, sa);
  return total / double(sa.size() + sb.size());
}

inline bool relative_close(double a, double b, double rel) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Small random RW instance: a lung of at most 4x4x4 voxels with at least
/// five voxels, edge weights uniform in [1e-6, 1], and a random seed set
/// with every lobe present.
struct RwInstance {
  MaskVolume lung;
  std::vector<double> weights;  ///< in edge construction order
  LungGraph graph;
  SeedSet seeds;
};

inline RwInstance random_rw_instance(std::mt19937_64& rng) {
  for (;;) {
    const GridMeta meta({uniform_int(rng, 2, 4), uniform_int(rng, 2, 4), uniform_int(rng, 1, 4)});
    MaskVolume lung(meta, 0);
    const double density = uniform(rng, 0.6, 1.0);
    std::vector<std::size_t> in;
    for (std::size_t i = 0; i < lung.size(); ++i) {
      if (uniform(rng, 0, 1) < density) {
        lung[i] = 1;
        in.push_back(i);
      }
    }
    if (in.size() < 6) continue;

    std::vector<double> weights;
    LungGraph graph(lung, [&](std::size_t, std::size_t) {
      weights.push_back(uniform(rng, 1e-6, 1.0));
      return weights.back();
    });

    std::shuffle(in.begin(), in.end(), rng);
    const std::size_t seeded = uniform_int(rng, 5, std::max<std::size_t>(5, in.size() * 2 / 3));
    std::array<VoxelList, 5> regions;
    for (std::size_t k = 0; k < seeded; ++k) {
      const std::size_t lobe = k < 5 ? k : uniform_int(rng, 0, 4);
      regions[lobe].push_back(in[k]);
    }
    return {std::move(lung), std::move(weights), std::move(graph), SeedSet(meta, regions)};
  }
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lobeseg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace lobeseg::testing
