// lobeseg: lung lobe segmentation from a boundary probability volume.
//
// Exit codes: 0 success, 1 invalid arguments, 2 input I/O or format error,
// 3 seeding failure, 4 solver failure. Failures print a single line
// "ERROR <kind>: <detail>" on stderr.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lobeseg/io.hpp"
#include "lobeseg/metrics.hpp"
#include "lobeseg/phantom.hpp"
#include "lobeseg/rw.hpp"
#include "lobeseg/seeding.hpp"

namespace fs = std::filesystem;
using namespace lobeseg;

namespace {

enum ExitCode { kOk = 0, kBadArgs = 1, kInputError = 2, kSeedingError = 3, kSolverError = 4 };

/// Raised while interpreting flags; always exits with kBadArgs.
struct ArgumentError : Error {
  ArgumentError(const std::string& kind, const std::string& detail) : Error(kind, detail) {}
};

int report(const std::string& kind, const std::string& detail, int code) {
  std::string flat = detail;
  for (char& c : flat) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "ERROR " << kind << ": " << flat << '\n';
  return code;
}

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "SeedCountNeverFive" || k == "LungPartitionError") return kSeedingError;
  if (k == "SolverDiverged") return kSolverError;
  return kInputError;
}

/// Runs `body` with the error-to-exit-code mapping applied.
int guarded(const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const ArgumentError& e) {
    return report(e.kind(), e.what(), kBadArgs);
  } catch (const Error& e) {
    return report(e.kind(), e.what(), exit_code_for(e));
  } catch (const std::exception& e) {
    return report("InternalError", e.what(), kInputError);
  }
}

/// Validation errors raised by `check` become argument errors.
void check_args(const std::function<void()>& check) {
  try {
    check();
  } catch (const Error& e) {
    throw ArgumentError(e.kind(), e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("InvalidArgument", "malformed " + what + ": '" + s + "'");
  }
}

std::pair<double, double> parse_range(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw ArgumentError("InvalidArgument", "malformed " + what + ": '" + s + "'");
  return {parse_real(parts[0], what), parse_real(parts[1], what)};
}

std::array<io::WindowSpec, 3> parse_windows(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) {
    throw ArgumentError("InvalidArgument", "expected three windows lo:hi,lo:hi,lo:hi, got '" + s + "'");
  }
  std::array<io::WindowSpec, 3> out{};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto [lo, hi] = parse_range(parts[c], "window");
    if (!(lo < hi)) throw ArgumentError("InvalidArgument", "window '" + parts[c] + "' needs lo < hi");
    out[c] = {lo, hi};
  }
  return out;
}

Index3 parse_dims(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw ArgumentError("InvalidArgument", "expected --dims nx,ny,nz");
  Index3 dims{};
  for (std::size_t a = 0; a < 3; ++a) {
    try {
      std::size_t used = 0;
      const long v = std::stol(parts[a], &used);
      if (used != parts[a].size() || v < 1) throw std::invalid_argument(parts[a]);
      dims[a] = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ArgumentError("InvalidArgument", "malformed dimension '" + parts[a] + "'");
    }
  }
  return dims;
}

struct SeedingFlags {
  SeedingConfig cfg;
  void attach(CLI::App* app) {
    app->add_option("--theta", cfg.theta, "Boundary probability threshold");
    app->add_option("--max-erosions", cfg.max_erosions, "Erosion limit before giving up");
    app->add_option("--min-seed-voxels", cfg.min_seed_voxels,
                    "Smallest component counted as a seed region");
  }
};

void print_seeds(const SeedSet& seeds) {
  std::cout << "erosion_iterations=" << seeds.erosion_iterations() << '\n';
  for (LobeId id : kAllLobes) {
    std::cout << "seed_voxels_" << lobe_name(id) << '=' << seeds.region(id).size() << '\n';
  }
}

struct Inputs {
  ScalarVolume prob;
  MaskVolume lung;
};

Inputs load_inputs(const std::string& prob_path, const std::string& lung_path) {
  Inputs in{io::read_scalar(prob_path), io::read_mask(lung_path)};
  require_same_grid(in.prob.meta(), in.lung.meta(), "--prob vs --lung");
  validate_probabilities(in.prob);
  return in;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lung lobe segmentation by seeded random walks on a boundary probability map"};
  app.require_subcommand(1);

  // segment
  std::string prob_path, lung_path, out_path, seeds_out, probs_prefix;
  SeedingFlags seg_seeding;
  RwConfig rw_cfg;
  auto* segment = app.add_subcommand("segment", "Seed and segment the five lobes");
  segment->add_option("--prob", prob_path, "Boundary probability volume")->required();
  segment->add_option("--lung", lung_path, "Lung mask volume")->required();
  segment->add_option("--out", out_path, "Output label volume")->required();
  segment->add_option("--beta", rw_cfg.beta, "Edge weight contrast");
  segment->add_option("--eps", rw_cfg.weight_floor, "Edge weight floor");
  segment->add_option("--tol", rw_cfg.cg_tolerance, "CG relative residual tolerance");
  segment->add_option("--max-iter", rw_cfg.cg_max_iterations, "CG iteration limit");
  segment->add_option("--seeds-out", seeds_out, "Optional seed label volume");
  segment->add_option("--probs-out-prefix", probs_prefix,
                      "Optional prefix for per-lobe probability volumes");
  seg_seeding.attach(segment);

  // seeds
  std::string seeds_prob, seeds_lung, seeds_path;
  SeedingFlags seed_flags;
  auto* seeds_cmd = app.add_subcommand("seeds", "Compute the five seed regions only");
  seeds_cmd->add_option("--prob", seeds_prob, "Boundary probability volume")->required();
  seeds_cmd->add_option("--lung", seeds_lung, "Lung mask volume")->required();
  seeds_cmd->add_option("--out", seeds_path, "Output seed label volume")->required();
  seed_flags.attach(seeds_cmd);

  // eval
  std::string pred_path, gt_path, csv_path;
  auto* eval = app.add_subcommand("eval", "Score a label volume against ground truth");
  eval->add_option("--pred", pred_path, "Predicted label volume")->required();
  eval->add_option("--gt", gt_path, "Ground-truth label volume")->required();
  eval->add_option("--csv", csv_path, "Output metrics CSV")->required();

  // phantom
  std::string dims_text = "64,64,64", out_dir;
  PhantomConfig phantom_cfg;
  auto* phantom = app.add_subcommand("phantom", "Write a synthetic lung phantom");
  phantom->add_option("--dims", dims_text, "Grid size nx,ny,nz");
  phantom->add_option("--gap-frac", phantom_cfg.gap_frac, "Fraction of fissure removed");
  phantom->add_option("--noise", phantom_cfg.noise_sigma, "Gaussian noise std on probabilities");
  phantom->add_option("--ridge-sigma", phantom_cfg.ridge_sigma, "Boundary ridge width (mm)");
  phantom->add_option("--seed", phantom_cfg.rng_seed, "RNG seed");
  phantom->add_option("--out-dir", out_dir, "Output directory")->required();

  // window
  std::string hu_path, window_prefix, windows_text = "-1000:200,-160:240,-1000:-775";
  auto* window = app.add_subcommand("window", "Map a Hounsfield volume to three 8-bit channels");
  window->add_option("--hu", hu_path, "int16 Hounsfield volume")->required();
  window->add_option("--out-prefix", window_prefix, "Output prefix")->required();
  window->add_option("--windows", windows_text, "Three windows lo:hi,lo:hi,lo:hi");

  // hist
  std::string scores_path, range_text = "0:1", hist_path;
  std::size_t bins = 10;
  auto* hist = app.add_subcommand("hist", "Cumulative histogram of per-case scores");
  hist->add_option("--scores", scores_path, "Scores CSV")->required();
  hist->add_option("--bins", bins, "Number of bins");
  hist->add_option("--range", range_text, "Score range lo:hi");
  hist->add_option("--out", hist_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("InvalidArgument", e.what(), kBadArgs);
  }

  if (*segment) {
    return guarded([&] {
      check_args([&] {
        seg_seeding.cfg.validate();
        rw_cfg.validate();
      });
      const Inputs in = load_inputs(prob_path, lung_path);
      const SeedSet seeds = seeds_from_probability(in.prob, in.lung, seg_seeding.cfg);
      print_seeds(seeds);
      const SegmentationResult result =
          segment_lobes(in.prob, in.lung, seeds, rw_cfg, !probs_prefix.empty());
      for (int k = 0; k < 4; ++k) {
        const auto name = lobe_name(kAllLobes[k]);
        const SolveStats& s = result.solver_stats[k];
        std::cout << "solver_" << name << "_iterations=" << s.iterations << '\n'
                  << "solver_" << name << "_residual=" << io::format_real(s.residual) << '\n'
                  << "solver_" << name << "_unknowns=" << s.unknowns << '\n';
      }
      std::cout << "orphan_nodes=" << result.solver_stats[0].orphan_nodes << '\n';
      for (const auto& w : result.warnings) std::cerr << "WARNING " << w << '\n';

      io::write_volume(result.labels, out_path);
      if (!seeds_out.empty()) io::write_volume(seeds.to_labels(), seeds_out);
      if (!probs_prefix.empty()) {
        for (LobeId id : kAllLobes) {
          io::write_volume(result.probabilities->lobes[lobe_index(id)],
                           probs_prefix + "_" + std::string(lobe_name(id)) + ".mhd");
        }
      }
    });
  }

  if (*seeds_cmd) {
    return guarded([&] {
      check_args([&] { seed_flags.cfg.validate(); });
      const Inputs in = load_inputs(seeds_prob, seeds_lung);
      const SeedSet seeds = seeds_from_probability(in.prob, in.lung, seed_flags.cfg);
      print_seeds(seeds);
      io::write_volume(seeds.to_labels(), seeds_path);
    });
  }

  if (*eval) {
    return guarded([&] {
      const LabelVolume pred = io::read_labels(pred_path);
      const LabelVolume gt = io::read_labels(gt_path);
      require_same_grid(pred.meta(), gt.meta(), "--pred vs --gt");
      const LobeScores scores = lobe_scores(pred, gt);
      io::write_metrics_csv({{fs::path(pred_path).stem().string(), scores}}, csv_path);
      std::cout << "overall_jaccard=" << io::format_real(scores.overall_jaccard) << '\n';
    });
  }

  if (*phantom) {
    return guarded([&] {
      check_args([&] {
        phantom_cfg.dims = parse_dims(dims_text);
        phantom_cfg.validate();
      });
      const PhantomCase pc = generate_phantom(phantom_cfg);
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
      const fs::path dir(out_dir);
      io::write_volume(pc.prob, dir / "prob.mhd");
      io::write_volume(pc.lung, dir / "lung.mhd");
      io::write_volume(pc.gt, dir / "gt.mhd");
      std::cout << "fissure_voxels=" << pc.fissure_voxel_count << '\n'
                << "zeroed_voxels=" << pc.zeroed_voxel_count << '\n';
    });
  }

  if (*window) {
    return guarded([&] {
      std::array<io::WindowSpec, 3> windows{};
      check_args([&] { windows = parse_windows(windows_text); });
      const HuVolume hu = io::read_hu(hu_path);
      const auto channels = io::hu_window(hu, windows);
      for (std::size_t c = 0; c < 3; ++c) {
        io::write_volume(channels[c], window_prefix + "_ch" + std::to_string(c + 1) + ".mhd");
      }
    });
  }

  if (*hist) {
    return guarded([&] {
      std::pair<double, double> range;
      check_args([&] {
        range = parse_range(range_text, "range");
        if (!(range.first < range.second)) throw InvalidArgument("--range needs lo < hi");
        if (bins < 1) throw InvalidArgument("--bins must be >= 1");
      });
      const auto scores = io::read_scores_csv(scores_path);
      io::write_histogram_csv(cumulative_histogram(scores, bins, range.first, range.second),
                              hist_path);
    });
  }
  return kBadArgs;
}
