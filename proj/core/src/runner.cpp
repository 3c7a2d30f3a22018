#include <cmath>
#include <cstdlib>
#include <fmt/format.h>
#include <future>
#include <sstream>

#include "kminlab/errors.hpp"
#include "kminlab/harness.hpp"
#include "kminlab/io.hpp"

namespace kminlab::harness {

namespace fs = std::filesystem;

groundstate::RadialProfile cached_ground_state(const RunConfig& cfg, const fs::path& beside) {
  fs::path cache_dir = beside;
  if (const char* env = std::getenv("KMINLAB_CACHE_DIR"); env && *env) cache_dir = env;
  fs::create_directories(cache_dir);

  const std::string normalized =
      fmt::format("groundstate {{ rmax={}, nodes={}, tol={} }}", io::format_double(cfg.gs_rmax),
                  cfg.gs_nodes, io::format_double(cfg.gs_tol));
  const fs::path cached = cache_dir / fmt::format("q_{}.csv", cache_key(normalized));
  if (fs::exists(cached)) {
    try {
      return io::read_profile_csv(cached).profile;
    } catch (const Error&) {
      // fall through to a fresh solve on a corrupt cache entry
    }
  }
  auto profile = groundstate::solve_ground_state(cfg.gs_rmax, cfg.gs_nodes, cfg.gs_tol);
  io::write_profile_csv(cached, profile, {});
  return profile;
}

double resolve_beta(const RunConfig& cfg, double beta_star) {
  if (std::isfinite(cfg.beta_abs)) return cfg.beta_abs;
  return cfg.beta_ratio * beta_star;
}

ExperimentOutcome run_experiment(const RunConfig& cfg) {
  const fs::path out_dir = cfg.out_dir;
  fs::create_directories(out_dir);

  ExperimentOutcome outcome;
  outcome.profile_csv = out_dir / "q_profile.csv";
  outcome.sweep_csv = out_dir / "sweep.csv";
  outcome.report_csv = out_dir / "report.csv";
  outcome.field_kfld = out_dir / "field.kfld";

  // 1. Ground state (cached by solver parameters).
  const auto profile = cached_ground_state(cfg, out_dir);
  const double beta_star = profile.mass;
  const double beta = resolve_beta(cfg, beta_star);

  // 2. Geometry and potential.
  auto grid = geometry::build_grid_shared(cfg.shape, cfg.resolution);
  auto spec = geometry::sample_potential(grid, cfg.wells, cfg.h_kind);
  const auto wc = geometry::classify_wells(spec, *grid, profile);

  const asymptotics::Regime regime =
      cfg.regime == "auto" ? asymptotics::detect_regime(beta, beta_star, wc)
                           : asymptotics::regime_from_name(cfg.regime);
  outcome.regime = regime;

  // Profile artifact with the standard moments plus the classification p.
  {
    std::vector<std::pair<double, double>> moments;
    for (double p : {1.0, 2.0, 3.0, wc.p})
      moments.emplace_back(p, groundstate::moment(profile, p));
    io::write_profile_csv(outcome.profile_csv, profile, moments);
  }

  // 3. Continuation sweep with incremental row writes.
  const auto b_list = parse_b_grid(cfg.b_grid_spec);
  minimizer::FlowConfig flow = cfg.flow;
  flow.beta_star = beta_star;
  flow.record_history = false;

  io::SweepWriter writer(outcome.sweep_csv, serialize_config(cfg, /*compact=*/true), beta,
                         beta_star);

  std::vector<minimizer::SweepEntry> entries;
  if (cfg.warm_start || cfg.workers <= 1) {
    entries = minimizer::continuation_sweep(
        grid, spec, beta, b_list, flow,
        [&](const minimizer::SweepEntry& e) { writer.write_row(io::make_sweep_row(e)); });
  } else {
    // Independent entries may run concurrently when warm starts are off;
    // rows are still written in b order by this thread.
    std::vector<std::future<minimizer::SweepEntry>> futs;
    for (double b : b_list)
      futs.push_back(std::async(std::launch::async, [&, b]() {
        minimizer::SweepEntry e;
        e.b = b;
        try {
          e.result = minimizer::minimize(grid, spec, b, beta, flow);
        } catch (const Error& err) {
          e.failed = true;
          e.error = err.what();
        }
        return e;
      }));
    for (auto& f : futs) {
      entries.push_back(f.get());
      writer.write_row(io::make_sweep_row(entries.back()));
    }
  }

  // 4. Analysis report.
  const auto pred = asymptotics::predict(regime, wc.p, wc.lambda.value_or(0.0), wc.kappa, beta,
                                         beta_star);
  const auto rows = asymptotics::make_report(entries, pred, *grid, spec, profile);
  io::write_report_csv(outcome.report_csv, rows, pred);

  // 5. Final converged field.
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (!it->failed) {
      io::write_kfld(outcome.field_kfld, it->result.u);
      break;
    }
  }

  bool all_converged = !entries.empty();
  for (const auto& e : entries)
    if (e.failed || !e.result.converged) all_converged = false;
  outcome.exit_status = all_converged ? 0 : 1;
  outcome.entries = std::move(entries);
  return outcome;
}

}  // namespace kminlab::harness
