#include "lobeseg/rw.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "lobeseg/kernels.hpp"
#include "lobeseg/morphology.hpp"

namespace lobeseg {

namespace {

constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

}  // namespace

void RwConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 0");
  if (!(weight_floor > 0.0 && weight_floor <= 1.0)) {
    throw InvalidArgument("weight floor must lie in (0, 1]");
  }
  if (!(cg_tolerance > 0.0 && cg_tolerance < 1.0)) {
    throw InvalidArgument("CG tolerance must lie in (0, 1)");
  }
  if (cg_max_iterations < 1) throw InvalidArgument("CG iteration limit must be positive");
}

double edge_weight(double pi, double pj, const RwConfig& cfg) noexcept {
  const double d = pi - pj;
  return std::max(std::exp(-cfg.beta * d * d), cfg.weight_floor);
}

// ---------------------------------------------------------------------------
// LungGraph

LungGraph::LungGraph(const MaskVolume& lung,
                     const std::function<double(std::size_t, std::size_t)>& weight)
    : meta_(lung.meta()), node_of_voxel_(lung.size(), kNoNode) {
  for (std::size_t i = 0; i < lung.size(); ++i) {
    if (lung[i]) {
      node_of_voxel_[i] = static_cast<std::uint32_t>(voxel_of_node_.size());
      voxel_of_node_.push_back(i);
    }
  }
  if (voxel_of_node_.empty()) throw EmptyLung("lung mask has no voxels");

  const std::size_t steps[3] = {1, meta_.nx(), meta_.nx() * meta_.ny()};
  for (std::uint32_t n = 0; n < voxel_of_node_.size(); ++n) {
    const std::size_t v = voxel_of_node_[n];
    const auto c = meta_.coords(v);
    for (int axis = 0; axis < 3; ++axis) {
      if (c[axis] + 1 >= meta_.dims()[axis]) continue;
      const std::size_t u = v + steps[axis];
      if (node_of_voxel_[u] == kNoNode) continue;
      edges_.push_back({n, node_of_voxel_[u], weight(v, u)});
    }
  }
  build_adjacency();
}

void LungGraph::build_adjacency() {
  std::vector<std::size_t> degree(node_count(), 0);
  for (const auto& e : edges_) {
    ++degree[e.a];
    ++degree[e.b];
  }
  offsets_.assign(node_count() + 1, 0);
  for (std::size_t n = 0; n < node_count(); ++n) offsets_[n + 1] = offsets_[n] + degree[n];
  adjacency_.assign(offsets_.back(), {});
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    adjacency_[fill[e.a]++] = {e.b, e.weight};
    adjacency_[fill[e.b]++] = {e.a, e.weight};
  }
}

std::optional<std::uint32_t> LungGraph::node(std::size_t voxel) const noexcept {
  if (voxel >= node_of_voxel_.size() || node_of_voxel_[voxel] == kNoNode) return std::nullopt;
  return node_of_voxel_[voxel];
}

LungGraph LungGraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("weight scale factor must be positive");
  LungGraph out = *this;
  for (auto& e : out.edges_) e.weight *= factor;
  for (auto& nb : out.adjacency_) nb.weight *= factor;
  return out;
}

LungGraph build_graph(const ScalarVolume& prob, const MaskVolume& lung, const RwConfig& cfg) {
  require_same_grid(prob.meta(), lung.meta(), "probability vs lung");
  cfg.validate();
  return LungGraph(lung, [&](std::size_t a, std::size_t b) {
    return edge_weight(prob[a], prob[b], cfg);
  });
}

// ---------------------------------------------------------------------------
// Sparse solve

namespace {

// Free nodes reachable from no seeded node through free nodes. Their block
// of the reduced Laplacian is singular, so they are kept out of the solve.
std::vector<std::uint8_t> find_orphans(const LungGraph& g, std::span<const SeedRole> roles) {
  const std::size_t n = g.node_count();
  std::vector<std::uint8_t> reached(n, 0);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (roles[i] == SeedRole::Free) continue;
    for (const auto& nb : g.neighbors(i)) {
      if (roles[nb.node] == SeedRole::Free && !reached[nb.node]) {
        reached[nb.node] = 1;
        stack.push_back(nb.node);
      }
    }
  }
  while (!stack.empty()) {
    const std::uint32_t cur = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(cur)) {
      if (roles[nb.node] == SeedRole::Free && !reached[nb.node]) {
        reached[nb.node] = 1;
        stack.push_back(nb.node);
      }
    }
  }
  std::vector<std::uint8_t> orphan(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) orphan[i] = roles[i] == SeedRole::Free && !reached[i];
  return orphan;
}

}  // namespace

DirichletSolution solve_dirichlet(const LungGraph& graph, std::span<const SeedRole> roles,
                                  const RwConfig& cfg) {
  namespace k = kernels::parallel;
  cfg.validate();
  const std::size_t n = graph.node_count();
  if (roles.size() != n) throw InvalidArgument("seed role count does not match node count");

  DirichletSolution out;
  out.values.assign(n, 0.0);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (roles[i] == SeedRole::Foreground) out.values[i] = 1.0;
  }

  const auto orphan = find_orphans(graph, roles);
  std::vector<std::uint32_t> unknown_of(n, kNoNode);
  std::vector<std::uint32_t> node_of_unknown;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (roles[i] != SeedRole::Free) continue;
    if (orphan[i]) {
      out.orphans.push_back(i);
    } else {
      unknown_of[i] = static_cast<std::uint32_t>(node_of_unknown.size());
      node_of_unknown.push_back(i);
    }
  }
  const std::size_t m = node_of_unknown.size();
  out.stats.unknowns = m;
  out.stats.orphan_nodes = out.orphans.size();
  if (m == 0) return out;

  // Reduced Laplacian L_u and right-hand side -B^T y_seeded.
  CsrMatrix a;
  a.rows = m;
  a.row_ptr.reserve(m + 1);
  std::vector<double> rhs(m, 0.0), inv_diag(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::uint32_t node = node_of_unknown[r];
    double degree = 0.0;
    const std::size_t diag_pos = a.col.size();
    a.col.push_back(static_cast<std::uint32_t>(r));
    a.val.push_back(0.0);
    for (const auto& nb : graph.neighbors(node)) {
      degree += nb.weight;
      if (roles[nb.node] == SeedRole::Foreground) {
        rhs[r] += nb.weight;
      } else if (roles[nb.node] == SeedRole::Free) {
        a.col.push_back(unknown_of[nb.node]);
        a.val.push_back(-nb.weight);
      }
    }
    a.val[diag_pos] = degree;
    inv_diag[r] = 1.0 / degree;
    a.row_ptr.push_back(a.col.size());
  }

  // Jacobi-preconditioned conjugate gradients from x = 0.
  std::vector<double> x(m, 0.0), r = rhs, z(m), p(m), ap(m);
  const double bnorm = std::sqrt(k::dot(rhs, rhs));
  if (bnorm == 0.0) return out;  // no foreground reachable: solution is 0

  for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = k::dot(r, z);
  double rel = 1.0;
  int it = 0;
  while (it < cfg.cg_max_iterations) {
    ++it;
    k::spmv(a, p, ap);
    const double alpha = rz / k::dot(p, ap);
    k::axpy(alpha, p, x);
    k::axpy(-alpha, ap, r);
    rel = std::sqrt(k::dot(r, r)) / bnorm;
    if (rel <= cfg.cg_tolerance) break;
    for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = k::dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
  }
  out.stats.iterations = it;
  out.stats.residual = rel;
  if (!(rel <= cfg.cg_tolerance)) throw SolverDiverged(rel, it);

  for (std::size_t u = 0; u < m; ++u) out.values[node_of_unknown[u]] = x[u];
  return out;
}

std::vector<SeedRole> seed_roles(const LungGraph& graph, const SeedSet& seeds, LobeId foreground) {
  require_same_grid(graph.meta(), seeds.meta(), "graph vs seeds");
  std::vector<SeedRole> roles(graph.node_count(), SeedRole::Free);
  for (LobeId id : kAllLobes) {
    const SeedRole role = id == foreground ? SeedRole::Foreground : SeedRole::Background;
    for (std::size_t v : seeds.region(id)) {
      const auto node = graph.node(v);
      if (!node) {
        throw InvalidArgument("seed voxel " + std::to_string(v) + " lies outside the lung");
      }
      roles[*node] = role;
    }
  }
  return roles;
}

std::vector<std::uint8_t> nearest_seed_lobe(const LungGraph& graph, const SeedSet& seeds) {
  require_same_grid(graph.meta(), seeds.meta(), "graph vs seeds");
  std::vector<std::uint8_t> best_label(graph.node_count(), 0);
  std::vector<double> best(graph.node_count(), std::numeric_limits<double>::infinity());
  for (LobeId id : kAllLobes) {
    const ScalarVolume dist = distance_transform(mask_from_indices(seeds.meta(), seeds.region(id)));
    for (std::uint32_t n = 0; n < graph.node_count(); ++n) {
      const double d = dist[graph.voxel(n)];
      if (d < best[n]) {
        best[n] = d;
        best_label[n] = lobe_label(id);
      }
    }
  }
  return best_label;
}

LobeSolution solve_lobe(const LungGraph& graph, const SeedSet& seeds, LobeId foreground,
                        const RwConfig& cfg, const std::vector<std::uint8_t>* nearest) {
  const auto roles = seed_roles(graph, seeds, foreground);
  DirichletSolution sol = solve_dirichlet(graph, roles, cfg);
  if (!sol.orphans.empty()) {
    std::vector<std::uint8_t> local;
    if (!nearest) {
      local = nearest_seed_lobe(graph, seeds);
      nearest = &local;
    }
    for (std::uint32_t o : sol.orphans) {
      sol.values[o] = (*nearest)[o] == lobe_label(foreground) ? 1.0 : 0.0;
    }
  }
  return {std::move(sol.values), sol.stats};
}

SegmentationResult segment_lobes(const LungGraph& graph, const SeedSet& seeds,
                                 const RwConfig& cfg, bool keep_probabilities) {
  cfg.validate();
  require_same_grid(graph.meta(), seeds.meta(), "graph vs seeds");
  const std::size_t n = graph.node_count();

  // Orphans are a property of the mask and the seed union, not of the
  // foreground choice, so one check covers all four solves.
  std::vector<std::uint8_t> nearest;
  {
    const auto roles = seed_roles(graph, seeds, LobeId::LU);
    const auto orphan = find_orphans(graph, roles);
    if (std::find(orphan.begin(), orphan.end(), 1) != orphan.end()) {
      nearest = nearest_seed_lobe(graph, seeds);
    }
  }

  std::array<LobeSolution, 4> solved;
  std::array<std::exception_ptr, 4> failure{};
#pragma omp parallel for schedule(static, 1)
  for (int k = 0; k < 4; ++k) {
    try {
      solved[k] = solve_lobe(graph, seeds, kAllLobes[k], cfg, nearest.empty() ? nullptr : &nearest);
    } catch (...) {
      failure[k] = std::current_exception();
    }
  }
  for (const auto& f : failure) {
    if (f) std::rethrow_exception(f);
  }

  SegmentationResult out{LabelVolume(graph.meta(), 0), std::nullopt, {}, {}};
  // Solver noise can push the four fields slightly outside [0, 1] or their
  // sum past 1. Clamp each, and take any overshoot off the largest so that
  // the complement makes the five fields sum to exactly 1.
  std::vector<double> last(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<double*, 4> y;
    for (int k = 0; k < 4; ++k) {
      y[k] = &solved[k].values[i];
      *y[k] = std::clamp(*y[k], 0.0, 1.0);
    }
    auto sum4 = [&] { return ((*y[0] + *y[1]) + *y[2]) + *y[3]; };
    double sum = sum4();
    for (int guard = 0; sum > 1.0 && guard < 8; ++guard) {
      double* top = *std::max_element(y.begin(), y.end(),
                                      [](const double* a, const double* b) { return *a < *b; });
      *top = std::max(0.0, *top - (sum - 1.0));
      sum = sum4();
    }
    last[i] = std::clamp(1.0 - sum, 0.0, 1.0);
  }

  for (std::uint32_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_value = solved[0].values[i];
    for (std::size_t k = 1; k < 5; ++k) {
      const double v = k < 4 ? solved[k].values[i] : last[i];
      if (v > best_value) {
        best_value = v;
        best = k;
      }
    }
    out.labels[graph.voxel(i)] = static_cast<std::uint8_t>(best + 1);
  }
  for (LobeId id : kAllLobes)
    for (std::size_t v : seeds.region(id)) out.labels[v] = lobe_label(id);

  for (int k = 0; k < 4; ++k) out.solver_stats[k] = solved[k].stats;
  if (const std::size_t orphans = solved[0].stats.orphan_nodes; orphans > 0) {
    out.warnings.push_back(std::to_string(orphans) +
                           " lung voxels have no path to any seed; labeled by nearest seed region");
  }

  if (keep_probabilities) {
    ProbabilityField field{{ScalarVolume(graph.meta(), 0.0), ScalarVolume(graph.meta(), 0.0),
                            ScalarVolume(graph.meta(), 0.0), ScalarVolume(graph.meta(), 0.0),
                            ScalarVolume(graph.meta(), 0.0)}};
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::size_t v = graph.voxel(i);
      for (int k = 0; k < 4; ++k) field.lobes[k][v] = solved[k].values[i];
      field.lobes[4][v] = last[i];
    }
    out.probabilities = std::move(field);
  }
  return out;
}

SegmentationResult segment_lobes(const ScalarVolume& prob, const MaskVolume& lung,
                                 const SeedSet& seeds, const RwConfig& cfg,
                                 bool keep_probabilities) {
  require_same_grid(prob.meta(), lung.meta(), "probability vs lung");
  require_same_grid(seeds.meta(), lung.meta(), "seeds vs lung");
  return segment_lobes(build_graph(prob, lung, cfg), seeds, cfg, keep_probabilities);
}

// ---------------------------------------------------------------------------
// Dense reference

std::vector<double> brute_force_rw(const LungGraph& graph, std::span<const SeedRole> roles) {
  const std::size_t n = graph.node_count();
  if (n > kBruteForceNodeCap) {
    throw TooLarge("dense solver accepts at most " + std::to_string(kBruteForceNodeCap) +
                   " nodes, got " + std::to_string(n));
  }
  if (roles.size() != n) throw InvalidArgument("seed role count does not match node count");

  // Full combinatorial Laplacian from the edge list.
  std::vector<double> lap(n * n, 0.0);
  for (const auto& e : graph.edges()) {
    lap[e.a * n + e.b] -= e.weight;
    lap[e.b * n + e.a] -= e.weight;
    lap[e.a * n + e.a] += e.weight;
    lap[e.b * n + e.b] += e.weight;
  }

  // Orphans: free nodes whose free-connected group touches no seed.
  std::vector<int> group(n, -1);
  std::vector<bool> group_seeded;
  for (std::size_t s = 0; s < n; ++s) {
    if (roles[s] != SeedRole::Free || group[s] >= 0) continue;
    const int g = static_cast<int>(group_seeded.size());
    bool seeded = false;
    std::vector<std::size_t> queue{s};
    group[s] = g;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t i = queue[head];
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || lap[i * n + j] == 0.0) continue;
        if (roles[j] != SeedRole::Free) {
          seeded = true;
        } else if (group[j] < 0) {
          group[j] = g;
          queue.push_back(j);
        }
      }
    }
    group_seeded.push_back(seeded);
  }

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == SeedRole::Free && group_seeded[group[i]]) free.push_back(i);
  }
  const std::size_t m = free.size();

  // Augmented system [L_u | -B^T y_s].
  std::vector<double> aug(m * (m + 1), 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < m; ++c) aug[r * (m + 1) + c] = lap[free[r] * n + free[c]];
    double b = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (roles[j] == SeedRole::Foreground) b -= lap[free[r] * n + j];
    }
    aug[r * (m + 1) + m] = b;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(aug[r * (m + 1) + col]) > std::abs(aug[pivot * (m + 1) + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t c = 0; c <= m; ++c) std::swap(aug[col * (m + 1) + c], aug[pivot * (m + 1) + c]);
    }
    const double d = aug[col * (m + 1) + col];
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = aug[r * (m + 1) + col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= m; ++c) aug[r * (m + 1) + c] -= f * aug[col * (m + 1) + c];
    }
  }
  std::vector<double> sol(m, 0.0);
  for (std::size_t r = m; r-- > 0;) {
    double acc = aug[r * (m + 1) + m];
    for (std::size_t c = r + 1; c < m; ++c) acc -= aug[r * (m + 1) + c] * sol[c];
    sol[r] = acc / aug[r * (m + 1) + r];
  }

  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == SeedRole::Foreground) y[i] = 1.0;
  }
  for (std::size_t r = 0; r < m; ++r) y[free[r]] = sol[r];
  return y;
}

std::vector<double> brute_force_rw(const LungGraph& graph, const SeedSet& seeds,
                                   LobeId foreground) {
  const std::size_t n = graph.node_count();
  std::vector<SeedRole> roles(n, SeedRole::Free);
  for (LobeId id : kAllLobes) {
    for (std::size_t v : seeds.region(id)) {
      const auto node = graph.node(v);
      if (!node) throw InvalidArgument("seed voxel outside the lung");
      roles[*node] = id == foreground ? SeedRole::Foreground : SeedRole::Background;
    }
  }
  std::vector<double> y = brute_force_rw(graph, roles);

  // Nodes with no path to a seed: breadth-first over the edge list.
  std::vector<int> reach(n, 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (roles[i] != SeedRole::Free) {
      reach[i] = 1;
      queue.push_back(i);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint32_t i = queue[head];
    for (const auto& e : graph.edges()) {
      if (e.a != i && e.b != i) continue;
      const std::uint32_t other = e.a == i ? e.b : e.a;
      if (!reach[other]) {
        reach[other] = 1;
        queue.push_back(other);
      }
    }
  }

  const auto& sp = graph.meta().spacing();
  for (std::uint32_t i = 0; i < n; ++i) {
    if (reach[i]) continue;
    const auto c = graph.meta().coords(graph.voxel(i));
    double best = std::numeric_limits<double>::infinity();
    LobeId best_id = LobeId::LU;
    for (LobeId id : kAllLobes) {
      for (std::size_t v : seeds.region(id)) {
        const auto s = graph.meta().coords(v);
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double d = (static_cast<double>(c[a]) - static_cast<double>(s[a])) * sp[a];
          d2 += d * d;
        }
        if (d2 < best) {
          best = d2;
          best_id = id;
        }
      }
    }
    y[i] = best_id == foreground ? 1.0 : 0.0;
  }
  return y;
}

}  // namespace lobeseg
