#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobeseg/seeding.hpp"
#include "lobeseg/volume.hpp"

namespace lobeseg {

struct RwConfig {
  double beta = 100.0;
  double weight_floor = 1e-6;
  double cg_tolerance = 1e-8;  ///< relative residual ||r|| / ||b||
  int cg_max_iterations = 5000;

  void validate() const;
};

/// max(exp(-beta * (pi - pj)^2), weight_floor)
double edge_weight(double pi, double pj, const RwConfig& cfg) noexcept;

/// Weighted Face6 graph over the voxels of a lung mask. Nodes are the
/// in-lung voxels in ascending flat-index order.
class LungGraph {
 public:
  struct Edge {
    std::uint32_t a;  ///< a < b
    std::uint32_t b;
    double weight;
  };
  struct Neighbor {
    std::uint32_t node;
    double weight;
  };

  /// One edge per unordered Face6 pair of in-lung voxels, weighted by
  /// `weight(voxel_a, voxel_b)` with voxel_a < voxel_b. Throws EmptyLung.
  LungGraph(const MaskVolume& lung,
            const std::function<double(std::size_t, std::size_t)>& weight);

  const GridMeta& meta() const noexcept { return meta_; }
  std::size_t node_count() const noexcept { return voxel_of_node_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t voxel(std::uint32_t node) const noexcept { return voxel_of_node_[node]; }
  /// Node of a voxel, or nullopt outside the lung.
  std::optional<std::uint32_t> node(std::size_t voxel) const noexcept;

  std::span<const Neighbor> neighbors(std::uint32_t node) const noexcept {
    return {adjacency_.data() + offsets_[node], adjacency_.data() + offsets_[node + 1]};
  }

  /// Copy with every edge weight multiplied by `factor` (> 0).
  LungGraph scaled(double factor) const;

 private:
  void build_adjacency();

  GridMeta meta_;
  std::vector<std::size_t> voxel_of_node_;
  std::vector<std::uint32_t> node_of_voxel_;  ///< kNoNode outside the lung
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Graph over `lung` weighted by edge_weight of the probabilities.
LungGraph build_graph(const ScalarVolume& prob, const MaskVolume& lung, const RwConfig& cfg);

/// Role of a node in one two-class Dirichlet problem.
enum class SeedRole : std::uint8_t { Free, Foreground, Background };

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;       ///< final relative residual
  std::size_t unknowns = 0;    ///< rows of the reduced system
  std::size_t orphan_nodes = 0;  ///< free nodes with no path to any seed
};

struct DirichletSolution {
  std::vector<double> values;  ///< per node; orphan nodes hold 0
  std::vector<std::uint32_t> orphans;
  SolveStats stats;
};

/// Minimizes sum_ij w_ij (y_i - y_j)^2 with y = 1 on foreground and 0 on
/// background nodes. Only free nodes connected to some seed enter the
/// reduced system, which is solved by Jacobi-preconditioned conjugate
/// gradients. Throws SolverDiverged past cfg.cg_max_iterations.
DirichletSolution solve_dirichlet(const LungGraph& graph, std::span<const SeedRole> roles,
                                  const RwConfig& cfg);

/// Per-node roles for "foreground lobe vs. the other four". Throws
/// InvalidArgument if a seed voxel lies outside the graph.
std::vector<SeedRole> seed_roles(const LungGraph& graph, const SeedSet& seeds, LobeId foreground);

/// Label (1..5) of the seed region nearest to each node, by spacing-aware
/// Euclidean distance; ties go to the smaller LobeId.
std::vector<std::uint8_t> nearest_seed_lobe(const LungGraph& graph, const SeedSet& seeds);

struct LobeSolution {
  std::vector<double> values;
  SolveStats stats;
};

/// Random-walker probability of `foreground`. Orphan nodes get 1 if their
/// nearest seed region is the foreground, else 0. `nearest` may pass a
/// precomputed nearest_seed_lobe table.
LobeSolution solve_lobe(const LungGraph& graph, const SeedSet& seeds, LobeId foreground,
                        const RwConfig& cfg,
                        const std::vector<std::uint8_t>* nearest = nullptr);

struct ProbabilityField {
  std::array<ScalarVolume, 5> lobes;  ///< index lobe_index(id)
};

struct SegmentationResult {
  LabelVolume labels;
  std::optional<ProbabilityField> probabilities;
  std::array<SolveStats, 4> solver_stats;  ///< LU, LL, RU, RM; RL is the complement
  std::vector<std::string> warnings;
};

/// Solves LU..RM, takes RL = clamp(1 - sum, 0, 1), labels each node by
/// argmax (smallest LobeId on ties) and forces seed voxels to their lobe.
SegmentationResult segment_lobes(const LungGraph& graph, const SeedSet& seeds,
                                 const RwConfig& cfg, bool keep_probabilities = true);

SegmentationResult segment_lobes(const ScalarVolume& prob, const MaskVolume& lung,
                                 const SeedSet& seeds, const RwConfig& cfg,
                                 bool keep_probabilities = true);

/// Dense reference solver for small graphs (<= 2000 nodes): assembles the
/// full Laplacian and solves the reduced system by Gaussian elimination.
/// Throws TooLarge above the cap. Orphan nodes hold 0.
std::vector<double> brute_force_rw(const LungGraph& graph, std::span<const SeedRole> roles);

/// As above for one lobe of a SeedSet, resolving orphans by brute-force
/// nearest seed voxel.
std::vector<double> brute_force_rw(const LungGraph& graph, const SeedSet& seeds,
                                   LobeId foreground);

inline constexpr std::size_t kBruteForceNodeCap = 2000;

}  // namespace lobeseg
