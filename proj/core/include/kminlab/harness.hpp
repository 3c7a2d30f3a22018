#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kminlab/asymptotics.hpp"
#include "kminlab/geometry.hpp"
#include "kminlab/minimizer.hpp"

namespace kminlab::harness {

/// Full experiment description, parsed from the block config format:
///
///   domain     { shape="disk", center=[0,0], radius=1, h=0.0078125 }
///   potential  { wells=[{x=[0,0], p=2}], h="const:1" }
///   model      { beta_ratio=1 }                  # or beta=<absolute>
///   groundstate{ rmax=20, nodes=8000, tol=1e-10 }
///   sweep      { b_grid="1e-2:1e-5:geometric:10", warm_start=true, workers=1 }
///   flow       { max_iters=400000, energy_tol=1e-10, grad_tol=1e-5, ... }
///   analysis   { regime="auto" }
///   output     { dir="out" }
struct RunConfig {
  geometry::Shape shape = geometry::Shape::rectangle(0, 1, 0, 1);
  double resolution = 1.0 / 64;

  std::vector<geometry::Well> wells;
  geometry::HKind h_kind;

  double beta_abs = std::numeric_limits<double>::quiet_NaN();
  double beta_ratio = std::numeric_limits<double>::quiet_NaN();

  double gs_rmax = 20.0;
  int gs_nodes = 8000;
  double gs_tol = 1e-10;

  std::string b_grid_spec = "1e-2:1e-4:geometric:6";
  bool warm_start = true;
  int workers = 1;

  minimizer::FlowConfig flow;

  std::string regime = "auto";
  std::string out_dir = ".";

  bool operator==(const RunConfig& other) const;
};

/// Parses the block config text. Throws ConfigError with line/field context.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical serialization; compact = single line (used inside sweep.csv).
std::string serialize_config(const RunConfig& cfg, bool compact = false);

/// "start:stop:kind:count" with kind geometric|linear, start > stop > 0.
std::vector<double> parse_b_grid(const std::string& spec);

/// Stable content hash over a normalized config fragment.
std::string cache_key(const std::string& normalized_text);

/// Ground-state solve with on-disk caching keyed by (rmax, nodes, tol).
/// Cache directory resolution: KMINLAB_CACHE_DIR env var, else `beside`.
groundstate::RadialProfile cached_ground_state(const RunConfig& cfg,
                                               const std::filesystem::path& beside);

/// beta resolved against beta* (exactly one of beta_abs / beta_ratio is set).
double resolve_beta(const RunConfig& cfg, double beta_star);

struct ExperimentOutcome {
  int exit_status = 1;
  std::filesystem::path profile_csv, sweep_csv, report_csv, field_kfld;
  asymptotics::Regime regime{};
  std::vector<minimizer::SweepEntry> entries;
};

/// Full pipeline: ground state (cached), grid/potential, continuation sweep
/// (incremental sweep.csv), analysis report, final field. Exit status 0 iff
/// every sweep entry converged.
ExperimentOutcome run_experiment(const RunConfig& cfg);

}  // namespace kminlab::harness
