// kminlab command line: ground-state solves, constrained minimization,
// continuation sweeps, and asymptotic-law analysis on bounded 2D domains.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kminlab/errors.hpp"
#include "kminlab/harness.hpp"
#include "kminlab/io.hpp"

namespace fs = std::filesystem;
using namespace kminlab;

namespace {

std::vector<double> parse_moment_list(const std::string& text) {
  std::vector<double> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(std::stod(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

int cmd_groundstate(double rmax, int nodes, double tol, const std::string& moments,
                    const std::string& out) {
  const auto profile = groundstate::solve_ground_state(rmax, nodes, tol);
  std::vector<std::pair<double, double>> mrows;
  for (double p : parse_moment_list(moments))
    mrows.emplace_back(p, groundstate::moment(profile, p));
  io::write_profile_csv(out, profile, mrows);
  std::printf("ground state: q0=%.10g mass=%.10g grad=%.10g quartic=%.10g -> %s\n",
              profile.q_at_zero, profile.mass, profile.grad_norm, profile.quartic, out.c_str());
  return 0;
}

struct Common {
  harness::RunConfig cfg;
  std::shared_ptr<const geometry::DomainGrid> grid;
  geometry::PotentialSpec spec;
  groundstate::RadialProfile profile;
  double beta = 0, beta_star = 0;
};

Common load_common(const std::string& config_path, const fs::path& beside) {
  Common c;
  c.cfg = harness::parse_config_file(config_path);
  c.profile = harness::cached_ground_state(c.cfg, beside);
  c.beta_star = c.profile.mass;
  c.beta = harness::resolve_beta(c.cfg, c.beta_star);
  c.grid = geometry::build_grid_shared(c.cfg.shape, c.cfg.resolution);
  c.spec = geometry::sample_potential(c.grid, c.cfg.wells, c.cfg.h_kind);
  c.cfg.flow.beta_star = c.beta_star;
  return c;
}

int cmd_minimize(const std::string& config_path, double b, const std::string& out) {
  Common c = load_common(config_path, fs::path(out).parent_path());
  auto res = minimizer::minimize(c.grid, c.spec, b, c.beta, c.cfg.flow);
  io::write_kfld(out, res.u);
  std::printf("b=%.6g energy=%.10g eps=%.6g z=(%.6g,%.6g) iters=%d %s -> %s\n", b,
              res.breakdown.total, res.eps_b, res.max_x, res.max_y, res.iterations,
              res.converged ? "converged" : "NOT converged", out.c_str());
  return res.converged ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& b_grid,
              const std::string& out) {
  Common c = load_common(config_path, fs::path(out).parent_path());
  if (!b_grid.empty()) c.cfg.b_grid_spec = b_grid;
  const auto b_list = harness::parse_b_grid(c.cfg.b_grid_spec);
  c.cfg.flow.record_history = false;
  io::SweepWriter writer(out, harness::serialize_config(c.cfg, true), c.beta, c.beta_star);
  bool all_ok = true;
  auto entries = minimizer::continuation_sweep(
      c.grid, c.spec, c.beta, b_list, c.cfg.flow, [&](const minimizer::SweepEntry& e) {
        writer.write_row(io::make_sweep_row(e));
        const bool ok = !e.failed && e.result.converged;
        all_ok = all_ok && ok;
        std::printf("b=%.6g %s\n", e.b,
                    e.failed ? e.error.c_str() : (ok ? "converged" : "not converged"));
      });
  std::printf("sweep: %zu entries -> %s\n", entries.size(), out.c_str());
  return all_ok ? 0 : 1;
}

int cmd_analyze(const std::string& sweep_path, const std::string& regime,
                const std::string& profile_path, const std::string& out) {
  const auto sweep = io::read_sweep_csv(sweep_path);
  if (sweep.config_line.empty())
    throw IoError("analyze: sweep file carries no embedded config");
  const auto cfg = harness::parse_config(sweep.config_line);
  const auto pf = io::read_profile_csv(profile_path);
  auto grid = geometry::build_grid_shared(cfg.shape, cfg.resolution);
  auto spec = geometry::sample_potential(grid, cfg.wells, cfg.h_kind);
  const auto wc = geometry::classify_wells(spec, *grid, pf.profile);

  const auto reg = regime == "auto"
                       ? asymptotics::detect_regime(sweep.beta, sweep.beta_star, wc)
                       : asymptotics::regime_from_name(regime);
  const auto pred = asymptotics::predict(reg, wc.p, wc.lambda.value_or(0.0), wc.kappa,
                                         sweep.beta, sweep.beta_star);

  // Rebuild scalar-level sweep entries from the rows.
  std::vector<minimizer::SweepEntry> entries;
  for (const auto& r : sweep.rows) {
    minimizer::SweepEntry e;
    e.b = r.b;
    if (!r.valid || !r.error.empty()) {
      e.failed = true;
      e.error = r.error.empty() ? "invalid row" : r.error;
    } else {
      e.result.converged = r.converged;
      e.result.iterations = r.iterations;
      e.result.breakdown.total = r.energy;
      e.result.breakdown.kinetic = r.kinetic;
      e.result.breakdown.kirchhoff = r.kirchhoff;
      e.result.breakdown.potential = r.potential;
      e.result.breakdown.quartic = r.quartic;
      e.result.breakdown.u4_integral = r.u4_integral;
      e.result.breakdown.mu = r.mu;
      e.result.eps_b = r.eps;
      e.result.max_x = r.max_x;
      e.result.max_y = r.max_y;
      e.result.max_value = r.max_value;
      e.result.constraint_drift = r.drift;
      e.result.grad_norm = r.grad_norm;
    }
    entries.push_back(std::move(e));
  }
  const auto rows = asymptotics::make_report(entries, pred, *grid, spec, pf.profile);
  io::write_report_csv(out, rows, pred);
  std::printf("analyze: regime=%s limit=%.6g -> %s\n", asymptotics::regime_name(reg).c_str(),
              pred.energy_limit, out.c_str());
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& b_grid, const std::string& regime) {
  auto cfg = harness::parse_config_file(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!b_grid.empty()) cfg.b_grid_spec = b_grid;
  if (!regime.empty()) cfg.regime = regime;
  const auto outcome = harness::run_experiment(cfg);
  std::printf("run: regime=%s entries=%zu exit=%d\n",
              asymptotics::regime_name(outcome.regime).c_str(), outcome.entries.size(),
              outcome.exit_status);
  return outcome.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kminlab: L2-constrained Kirchhoff energy minimization laboratory"};
  app.require_subcommand(1);

  // groundstate
  double rmax = 20.0, tol = 1e-10;
  int nodes = 8000;
  std::string moments = "1,2,3";
  std::string gs_out = "q_profile.csv";
  auto* gs = app.add_subcommand("groundstate", "Solve the radial ground state Q");
  gs->add_option("--rmax", rmax, "Truncation radius");
  gs->add_option("--nodes", nodes, "Grid nodes");
  gs->add_option("--tol", tol, "Shooting tolerance");
  gs->add_option("--moments", moments, "Comma-separated moment exponents");
  gs->add_option("--out", gs_out, "Output CSV");

  // minimize
  std::string min_cfg, min_out = "field.kfld";
  double min_b = 1e-3;
  auto* mn = app.add_subcommand("minimize", "Single constrained minimization");
  mn->add_option("--config", min_cfg, "Config file")->required();
  mn->add_option("--b", min_b, "Kirchhoff coefficient");
  mn->add_option("--out", min_out, "Output KFLD field");

  // sweep
  std::string sw_cfg, sw_bgrid, sw_out = "sweep.csv";
  auto* sw = app.add_subcommand("sweep", "Continuation sweep in b");
  sw->add_option("--config", sw_cfg, "Config file")->required();
  sw->add_option("--b-grid", sw_bgrid, "start:stop:kind:count (overrides config)");
  sw->add_option("--out", sw_out, "Output sweep CSV");

  // analyze
  std::string an_sweep, an_regime = "auto", an_profile = "q_profile.csv",
              an_out = "report.csv";
  auto* an = app.add_subcommand("analyze", "Normalize a sweep against the predicted limits");
  an->add_option("--sweep", an_sweep, "Sweep CSV")->required();
  an->add_option("--regime", an_regime, "auto|CRIT_INTERIOR|CRIT_BOUNDARY|SUPER_INTERIOR|SUPER_BOUNDARY");
  an->add_option("--profile", an_profile, "Ground-state CSV");
  an->add_option("--out", an_out, "Output report CSV");

  // run
  std::string run_cfg, run_out_dir, run_bgrid, run_regime;
  auto* rn = app.add_subcommand("run", "Full pipeline: ground state, sweep, analysis");
  rn->add_option("--config", run_cfg, "Config file")->required();
  rn->add_option("--out-dir", run_out_dir, "Output directory (overrides config)");
  rn->add_option("--b-grid", run_bgrid, "Sweep grid (overrides config)");
  rn->add_option("--regime", run_regime, "Regime override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gs->parsed()) return cmd_groundstate(rmax, nodes, tol, moments, gs_out);
    if (mn->parsed()) return cmd_minimize(min_cfg, min_b, min_out);
    if (sw->parsed()) return cmd_sweep(sw_cfg, sw_bgrid, sw_out);
    if (an->parsed()) return cmd_analyze(an_sweep, an_regime, an_profile, an_out);
    if (rn->parsed()) return cmd_run(run_cfg, run_out_dir, run_bgrid, run_regime);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
