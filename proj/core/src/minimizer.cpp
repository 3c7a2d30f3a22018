#include "kminlab/minimizer.hpp"
#include <cstdlib>
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "kminlab/errors.hpp"
#include "pairwise.hpp"

namespace kminlab::minimizer {

using energy::EnergyBreakdown;
using energy::Field;
using geometry::DomainGrid;
using geometry::PotentialSpec;

namespace {

double inner(const Field& a, const Field& b) {
  const int nx = a.grid->nx, ny = a.grid->ny;
  std::vector<double> rows(ny, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* pa = a.values.data() + static_cast<size_t>(j) * nx;
    const double* pb = b.values.data() + static_cast<size_t>(j) * nx;
    double s = 0.0;
    for (int i = 0; i < nx; ++i) s += pa[i] * pb[i];
    rows[j] = s;
  }
  return a.grid->cell_area() * detail::pairwise_sum(rows);
}

// Bilinear sample of u at physical point (px, py); zero outside the lattice.
double sample(const Field& u, double px, double py) {
  const auto& g = *u.grid;
  const double fi = (px - g.ox) / g.hx;
  const double fj = (py - g.oy) / g.hy;
  const int i = static_cast<int>(std::floor(fi));
  const int j = static_cast<int>(std::floor(fj));
  if (i < 0 || j < 0 || i + 1 >= g.nx || j + 1 >= g.ny) return 0.0;
  const double tx = fi - i, ty = fj - j;
  const double* row = u.values.data() + static_cast<size_t>(j) * g.nx + i;
  const double v00 = row[0], v10 = row[1];
  const double v01 = row[g.nx], v11 = row[g.nx + 1];
  return (1 - tx) * (1 - ty) * v00 + tx * (1 - ty) * v10 + (1 - tx) * ty * v01 + tx * ty * v11;
}

struct Peak {
  int i = 0, j = 0;
  double x = 0, y = 0, value = 0;
};

// Discrete argmax refined by a quadratic fit over the 3x3 neighborhood.
Peak locate_peak(const Field& u) {
  const auto& g = *u.grid;
  Peak p;
  double best = -1.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double v = u.values[g.idx(i, j)];
      if (v > best) {
        best = v;
        p.i = i;
        p.j = j;
      }
    }
  p.value = best;
  p.x = g.x(p.i);
  p.y = g.y(p.j);
  if (p.i < 1 || p.j < 1 || p.i + 1 >= g.nx || p.j + 1 >= g.ny) return p;

  // Least-squares quadratic on the 3x3 stencil; standard separable estimates
  // for gradient and Hessian in index units.
  double s[3][3];
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) s[dj + 1][di + 1] = u.values[g.idx(p.i + di, p.j + dj)];
  const double gx = (s[1][2] - s[1][0]) / 2.0;
  const double gy = (s[2][1] - s[0][1]) / 2.0;
  const double hxx = s[1][2] - 2.0 * s[1][1] + s[1][0];
  const double hyy = s[2][1] - 2.0 * s[1][1] + s[0][1];
  const double hxy = (s[2][2] - s[2][0] - s[0][2] + s[0][0]) / 4.0;
  const double det = hxx * hyy - hxy * hxy;
  if (det != 0.0 && hxx < 0.0 && hyy < 0.0) {
    double dx = -(hyy * gx - hxy * gy) / det;
    double dy = -(hxx * gy - hxy * gx) / det;
    dx = std::clamp(dx, -0.75, 0.75);
    dy = std::clamp(dy, -0.75, 0.75);
    p.x += dx * g.hx;
    p.y += dy * g.hy;
    p.value = s[1][1] + gx * dx + gy * dy +
              0.5 * (hxx * dx * dx + 2.0 * hxy * dx * dy + hyy * dy * dy);
  }
  return p;
}

double cfl_step(const DomainGrid& g, double b, double kinetic) {
  const double h2 = 1.0 / (1.0 / (g.hx * g.hx) + 1.0 / (g.hy * g.hy));
  return h2 / 4.0 / (1.0 + b * kinetic);
}

// y = (c - Lap_h) x on interior nodes.
void apply_shifted_neglap(const Field& x, double c, Field& y) {
  const auto& g = *x.grid;
  const int nx = g.nx, ny = g.ny;
  const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
  std::fill(y.values.begin(), y.values.end(), 0.0);
  for (int j = 1; j + 1 < ny; ++j) {
    const double* row = x.values.data() + static_cast<size_t>(j) * nx;
    const double* rn = row - nx;
    const double* rp = row + nx;
    const std::uint8_t* mrow = g.interior.data() + static_cast<size_t>(j) * nx;
    double* orow = y.values.data() + static_cast<size_t>(j) * nx;
    for (int i = 1; i + 1 < nx; ++i) {
      if (!mrow[i]) continue;
      const double lap = (row[i + 1] - 2.0 * row[i] + row[i - 1]) * ihx2 +
                         (rp[i] - 2.0 * row[i] + rn[i]) * ihy2;
      orow[i] = c * row[i] - lap;
    }
  }
}

// Fixed-iteration CG for (c - Lap_h) z = rhs; the constant iteration count
// keeps runs bit-reproducible. The inexact solve is still an SPD map of rhs,
// so the result is a descent direction.
Field helmholtz_solve(const Field& rhs, double c, int iters) {
  Field z = Field::zeros(rhs.grid);
  Field r = rhs;
  Field p = r;
  Field ap = Field::zeros(rhs.grid);
  double rz = inner(r, r);
  if (rz <= 0.0) return z;
  for (int k = 0; k < iters; ++k) {
    apply_shifted_neglap(p, c, ap);
    const double pap = inner(p, ap);
    if (pap <= 0.0) break;
    const double alpha = rz / pap;
    for (size_t i = 0; i < z.values.size(); ++i) {
      z.values[i] += alpha * p.values[i];
      r.values[i] -= alpha * ap.values[i];
    }
    const double rz_new = inner(r, r);
    if (rz_new < 1e-28 * rz) break;
    const double beta = rz_new / rz;
    rz = rz_new;
    for (size_t i = 0; i < p.values.size(); ++i) p.values[i] = r.values[i] + beta * p.values[i];
  }
  return z;
}

// 1D descent search used by the auxiliary moves: expands t geometrically from
// +/- step0 while the objective decreases (the soft-mode offset can exceed the
// drift sampled per window by orders of magnitude), then golden-sections the
// bracketing interval. Returns the best t (0.0 when nothing beat f(0)).
double expanding_line_min(const std::function<double(double)>& f, double f0, double step0,
                          double t_max) {
  double best_t = 0.0, best_f = f0;
  for (double sign : {1.0, -1.0}) {
    double t_prev = 0.0, f_prev = f0;
    double t = sign * step0;
    double f_t = f(t);
    if (f_t < best_f) {
      best_f = f_t;
      best_t = t;
    }
    if (f_t >= f_prev) continue;  // not a descent direction
    // expand until the objective turns up
    double t_pp = 0.0;
    while (std::abs(t) < t_max) {
      t_pp = t_prev;
      t_prev = t;
      f_prev = f_t;
      t *= 3.0;
      f_t = f(t);
      if (f_t < best_f) {
        best_f = f_t;
        best_t = t;
      }
      if (f_t >= f_prev) break;
    }
    // golden section inside [t_pp, t]
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::min(t_pp, t), b2 = std::max(t_pp, t);
    double c1 = b2 - phi * (b2 - a), c2 = a + phi * (b2 - a);
    double f1 = f(c1), f2 = f(c2);
    if (f1 < best_f) {
      best_f = f1;
      best_t = c1;
    }
    if (f2 < best_f) {
      best_f = f2;
      best_t = c2;
    }
    for (int gs = 0; gs < 12; ++gs) {
      if (f1 < f2) {
        b2 = c2;
        c2 = c1;
        f2 = f1;
        c1 = b2 - phi * (b2 - a);
        f1 = f(c1);
        if (f1 < best_f) {
          best_f = f1;
          best_t = c1;
        }
      } else {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + phi * (b2 - a);
        f2 = f(c2);
        if (f2 < best_f) {
          best_f = f2;
          best_t = c2;
        }
      }
    }
    if (best_t != 0.0) break;  // first direction already descends
  }
  return best_t;
}

bool stalled(const std::vector<double>& hist, int window, double tol) {
  const size_t n = hist.size();
  if (n < static_cast<size_t>(window) + 1) return false;
  const double now = hist[n - 1];
  const double then = hist[n - 1 - window];
  return std::abs(then - now) < tol * std::max(std::abs(now), 1e-30);
}

}  // namespace

Field rescale_about(const Field& u, double cx, double cy, double s) {
  const auto& g = *u.grid;
  Field w = Field::zeros(u.grid);
  for (int j = 0; j < g.ny; ++j) {
    const std::uint8_t* mrow = g.interior.data() + static_cast<size_t>(j) * g.nx;
    double* orow = w.values.data() + static_cast<size_t>(j) * g.nx;
    for (int i = 0; i < g.nx; ++i) {
      if (!mrow[i]) continue;
      orow[i] = s * sample(u, cx + s * (g.x(i) - cx), cy + s * (g.y(j) - cy));
    }
  }
  return w;
}

Field gaussian_init(std::shared_ptr<const DomainGrid> grid, double cx, double cy, double width) {
  Field f = Field::zeros(grid);
  const auto& g = *grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.is_interior(i, j)) continue;
      const double dx = g.x(i) - cx, dy = g.y(j) - cy;
      f.values[g.idx(i, j)] = std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
    }
  f.renormalize();
  return f;
}

Field eigenmode_init(std::shared_ptr<const DomainGrid> grid) {
  Field f = Field::zeros(grid);
  const auto& g = *grid;
  const double lx = (g.nx - 1) * g.hx, ly = (g.ny - 1) * g.hy;
  constexpr double pi = 3.14159265358979323846;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!g.is_interior(i, j)) continue;
      f.values[g.idx(i, j)] =
          std::sin(pi * (g.x(i) - g.ox) / lx) * std::sin(pi * (g.y(j) - g.oy) / ly);
    }
  f.renormalize();
  return f;
}

MinimizeResult minimize(std::shared_ptr<const DomainGrid> grid, const PotentialSpec& spec,
                        double b, double beta, const FlowConfig& cfg) {
  if (b < 0.0 || beta < 0.0) throw DomainError("minimize: b and beta must be >= 0");
  if (b == 0.0) {
    // Theorem 1.1: no minimizer exists at b = 0 once beta >= beta*.
    if (!std::isfinite(cfg.beta_star))
      throw IllPosed("minimize: b = 0 requires beta* in FlowConfig for the well-posedness check");
    if (beta >= cfg.beta_star * 0.98)
      throw IllPosed(fmt::format(
          "minimize: b = 0 with beta = {:g} >= (1 - margin) beta* has no minimizer", beta));
  }
  if (!(cfg.backtracking > 0.0) || cfg.backtracking >= 1.0)
    throw DomainError("minimize: backtracking factor must lie in (0,1)");
  if (!(cfg.energy_tol > 0.0) || !(cfg.grad_tol > 0.0))
    throw DomainError("minimize: tolerances must be positive");

  // Initial iterate.
  Field u = Field::zeros(grid);
  switch (cfg.init_kind) {
    case FlowConfig::Init::gaussian_at_point: {
      double cx = cfg.init_cx, cy = cfg.init_cy, w = cfg.init_width;
      if (!std::isfinite(cx) || !std::isfinite(cy)) {
        // Default: center on the flattest well (deepest potential direction).
        const geometry::Well* bestw = nullptr;
        for (const auto& well : spec.wells)
          if (!bestw || well.p > bestw->p) bestw = &well;
        cx = bestw ? bestw->x : grid->ox + 0.5 * (grid->nx - 1) * grid->hx;
        cy = bestw ? bestw->y : grid->oy + 0.5 * (grid->ny - 1) * grid->hy;
        // Wells within the boundary layer start shifted inward, mirroring the
        // boundary trial-function center.
        const double h = std::max(grid->hx, grid->hy);
        const double d = grid->boundary_distance(cx, cy);
        if (d < 2.0 * h && bestw) {
          const double p = bestw->p;
          double eps_pred = std::pow(std::max(b, 1e-12), 1.0 / (p + 4.0));
          if (std::isfinite(cfg.beta_star) && beta > cfg.beta_star)
            eps_pred = std::sqrt(cfg.beta_star * b / (beta - cfg.beta_star));
          const double shift =
              std::max(0.5 * (p + 2.0) * eps_pred * std::abs(std::log(eps_pred)), 3.0 * h);
          double nxv, nyv;
          grid->outward_normal(cx, cy, nxv, nyv);
          cx -= shift * nxv;
          cy -= shift * nyv;
        }
      }
      if (!std::isfinite(w)) {
        double eps_pred = 0.2;
        if (b > 0.0) {
          const double pmax =
              spec.wells.empty()
                  ? 2.0
                  : std::max_element(spec.wells.begin(), spec.wells.end(),
                                     [](auto& a, auto& b2) { return a.p < b2.p; })
                        ->p;
          eps_pred = std::pow(b, 1.0 / (pmax + 4.0));
          if (std::isfinite(cfg.beta_star) && beta > cfg.beta_star)
            eps_pred = std::sqrt(cfg.beta_star * b / (beta - cfg.beta_star));
        }
        w = std::max(eps_pred, 3.0 * std::max(grid->hx, grid->hy));
      }
      u = gaussian_init(grid, cx, cy, w);
      break;
    }
    case FlowConfig::Init::eigenmode:
      u = eigenmode_init(grid);
      break;
    case FlowConfig::Init::warm_start: {
      if (!cfg.warm_field) throw DomainError("minimize: warm_start without a field");
      if (cfg.warm_field->grid.get() == grid.get()) {
        u = *cfg.warm_field;
      } else {
        // Resample bilinearly onto this grid.
        u = Field::zeros(grid);
        for (int j = 0; j < grid->ny; ++j)
          for (int i = 0; i < grid->nx; ++i)
            if (grid->is_interior(i, j))
              u.values[grid->idx(i, j)] = sample(*cfg.warm_field, grid->x(i), grid->y(j));
      }
      u.apply_mask();
      u.renormalize();
      break;
    }
  }

  MinimizeResult res;
  EnergyBreakdown e = energy::evaluate(u, b, beta, spec);
  const bool precond = cfg.precond == FlowConfig::Precond::helmholtz;
  double tau = cfg.step0 > 0.0
                   ? cfg.step0
                   : (precond ? 0.25 / (1.0 + b * e.kinetic) : cfl_step(*grid, b, e.kinetic));
  std::vector<double> hist{e.total};

  // Drift extraction for the extrapolation move: boxcar averages of the
  // iterates over consecutive windows. Averaging cancels the alternating
  // top-of-spectrum component left by CFL-edge steps; any accepted jump
  // invalidates the running window.
  const int drift_window = std::max(cfg.extrapolate_every, 1);
  Field drift_acc = Field::zeros(grid);
  Field prev_avg = Field::zeros(grid);
  int drift_count = 0;
  bool have_prev_avg = false;
  auto reset_drift = [&]() {
    std::fill(drift_acc.values.begin(), drift_acc.values.end(), 0.0);
    drift_count = 0;
    have_prev_avg = false;
  };

  int it = 0;
  std::string stop;
  double gpn = 0.0;
  for (; it < cfg.max_iters; ++it) {
    Field g = energy::gradient(u, b, beta, spec);
    const double mu2 = inner(g, u);  // = 2 mu on the unit sphere
    // Projected gradient for the stopping test; the step itself uses the raw
    // gradient, renormalization removes the radial component.
    double gsq = 0.0;
    {
      std::vector<double> rows(grid->ny, 0.0);
      for (int j = 0; j < grid->ny; ++j) {
        const double* pg = g.values.data() + static_cast<size_t>(j) * grid->nx;
        const double* pu = u.values.data() + static_cast<size_t>(j) * grid->nx;
        double s = 0.0;
        for (int i = 0; i < grid->nx; ++i) {
          const double d = pg[i] - mu2 * pu[i];
          s += d * d;
        }
        rows[j] = s;
      }
      gsq = grid->cell_area() * detail::pairwise_sum(rows);
    }
    gpn = std::sqrt(gsq);
    if (gpn < cfg.grad_tol) {
      stop = "grad_tol";
      break;
    }

    // The step rides below the stability cap of its metric: the plain L2 step
    // under the diffusive CFL limit, the preconditioned step under the O(1)
    // bound of the flattened spectrum.
    // Preconditioned steps sit at the contraction optimum of the flattened
    // spectrum (top eigenvalue ~ 2(1+bK)); riding the stability edge instead
    // leaves neutrally oscillating top modes that poison the drift signal.
    const double tau_cap =
        cfg.step0 > 0.0 ? cfg.step0
                        : (precond ? 0.5 / (1.0 + b * e.kinetic) : cfl_step(*grid, b, e.kinetic));
    double t = std::min(tau * 2.0, tau_cap);
    Field dir = g;
    if (precond) {
      // Precondition the tangential gradient and re-project: the step then
      // has strictly negative directional derivative through the
      // renormalization, which a preconditioned raw gradient does not.
      Field gp = g;
      for (size_t k = 0; k < gp.values.size(); ++k) gp.values[k] -= mu2 * u.values[k];
      dir = helmholtz_solve(gp, std::max(e.kinetic, 1.0), cfg.precond_iters);
      const double radial = inner(dir, u);
      for (size_t k = 0; k < dir.values.size(); ++k) dir.values[k] -= radial * u.values[k];
    }
    Field v = Field::zeros(grid);
    EnergyBreakdown ev;
    bool floored = false;
    while (true) {
      for (size_t k = 0; k < u.values.size(); ++k) v.values[k] = u.values[k] - t * dir.values[k];
      v.apply_mask();
      v.renormalize();
      ev = energy::evaluate(v, b, beta, spec);
      if (ev.total <= e.total) break;
      t *= cfg.backtracking;
      if (t < 1e-14) {
        // No descent at any representable step. At the double-precision
        // energy floor this is convergence; with real progress still pending
        // it is the StepUnderflow contract violation.
        if (hist.size() > 4 &&
            std::abs(hist[hist.size() - 4] - e.total) <
                1e3 * cfg.energy_tol * std::max(std::abs(e.total), 1e-30)) {
          floored = true;
          break;
        }
        throw StepUnderflow(fmt::format(
            "minimize: backtracking drove the step below 1e-14 at iteration {}", it));
      }
    }
    if (floored) {
      stop = "step_floor";
      ++it;
      break;
    }
    u = std::move(v);
    e = ev;
    tau = t;
    hist.push_back(e.total);

    if (cfg.scale_move_every > 0 && (it + 1) % cfg.scale_move_every == 0) {
      // Dilation relaxation about the current peak (log-scale line search).
      const Peak pk = locate_peak(u);
      auto feval = [&](double ls) {
        Field w = rescale_about(u, pk.x, pk.y, std::exp(ls));
        const double n = w.l2_norm();
        if (n == 0.0) return std::numeric_limits<double>::infinity();
        for (double& vv : w.values) vv /= n;
        return energy::evaluate(w, b, beta, spec).total;
      };
      const double ls = expanding_line_min(feval, e.total, 0.02, std::log(8.0));
      if (ls != 0.0) {
        Field w = rescale_about(u, pk.x, pk.y, std::exp(ls));
        w.renormalize();
        const EnergyBreakdown ew = energy::evaluate(w, b, beta, spec);
        if (ew.total < e.total) {
          u = std::move(w);
          e = ew;
          hist.push_back(e.total);
          reset_drift();
        }
      }
    }

    if (cfg.extrapolate_every > 0) {
      for (size_t k = 0; k < u.values.size(); ++k) drift_acc.values[k] += u.values[k];
      if (++drift_count == drift_window) {
        Field avg = Field::zeros(grid);
        for (size_t k = 0; k < avg.values.size(); ++k)
          avg.values[k] = drift_acc.values[k] / drift_window;
        if (have_prev_avg) {
          // Exact line search along the averaged drift. The per-window drift
          // is tiny against the remaining slow-mode offset, so the search
          // range must extend far beyond t = 1.
          Field d = avg;
          for (size_t k = 0; k < d.values.size(); ++k) d.values[k] -= prev_avg.values[k];
          bool jumped = false;
          if (d.l2_norm() > 1e-14) {
            auto feval = [&](double t2) {
              Field w = u;
              for (size_t k = 0; k < w.values.size(); ++k) w.values[k] += t2 * d.values[k];
              w.apply_mask();
              const double n = w.l2_norm();
              if (n == 0.0) return std::numeric_limits<double>::infinity();
              for (double& vv : w.values) vv /= n;
              return energy::evaluate(w, b, beta, spec).total;
            };
            const double tb = expanding_line_min(feval, e.total, 1.0, 1e8);
            if (std::getenv("KMINLAB_DEBUG_MOVES"))
              std::fprintf(stderr, "[extrap it=%d] |d|=%.3e t*=%.3e E=%.12e f(t*)=%.12e\n", it,
                           d.l2_norm(), tb, e.total, tb != 0.0 ? feval(tb) : e.total);
            if (tb != 0.0) {
              Field w = u;
              for (size_t k = 0; k < w.values.size(); ++k) w.values[k] += tb * d.values[k];
              w.apply_mask();
              w.renormalize();
              const EnergyBreakdown ew = energy::evaluate(w, b, beta, spec);
              if (ew.total < e.total) {
                u = std::move(w);
                e = ew;
                hist.push_back(e.total);
                jumped = true;
              }
            }
          }
          if (jumped) {
            reset_drift();
          } else {
            prev_avg = std::move(avg);
            std::fill(drift_acc.values.begin(), drift_acc.values.end(), 0.0);
            drift_count = 0;
          }
        } else {
          prev_avg = std::move(avg);
          have_prev_avg = true;
          std::fill(drift_acc.values.begin(), drift_acc.values.end(), 0.0);
          drift_count = 0;
        }
      }
    }

    if (stalled(hist, cfg.stall_window, cfg.energy_tol)) {
      stop = "energy_stall";
      ++it;
      break;
    }
  }
  if (stop.empty()) stop = "max_iters";

  // Sign-fix: make the dominant peak positive, clear numerically negative
  // residue, and renormalize once.
  double amax = 0.0;
  bool flip = false;
  for (double v : u.values)
    if (std::abs(v) > amax) {
      amax = std::abs(v);
      flip = v < 0.0;
    }
  if (flip)
    for (double& v : u.values) v = -v;
  for (double& v : u.values)
    if (v < 0.0 && v > -1e-10 * amax) v = 0.0;
  u.apply_mask();
  u.renormalize();
  e = energy::evaluate(u, b, beta, spec);

  res.u = std::move(u);
  res.breakdown = e;
  res.iterations = it;
  res.converged = stop == "grad_tol" || stop == "energy_stall" || stop == "step_floor";
  res.stop_reason = stop;
  const Peak pk = locate_peak(res.u);
  res.max_x = pk.x;
  res.max_y = pk.y;
  res.max_value = pk.value;
  res.eps_b = 1.0 / std::sqrt(e.kinetic);
  res.grad_norm = gpn;
  res.constraint_drift = res.u.mass_drift();
  if (cfg.record_history) res.history = std::move(hist);
  return res;
}

std::vector<SweepEntry> continuation_sweep(std::shared_ptr<const DomainGrid> grid,
                                           const PotentialSpec& spec, double beta,
                                           std::span<const double> b_list, const FlowConfig& cfg,
                                           const std::function<void(const SweepEntry&)>& on_entry) {
  if (b_list.empty()) throw DomainError("continuation_sweep: empty b list");
  for (size_t i = 0; i + 1 < b_list.size(); ++i)
    if (!(b_list[i] > b_list[i + 1]))
      throw DomainError("continuation_sweep: b_list must be strictly decreasing");
  for (double b : b_list)
    if (!(b > 0.0)) throw DomainError("continuation_sweep: all b must be > 0");

  double pmax = 0.0;
  for (const auto& w : spec.wells) pmax = std::max(pmax, w.p);
  const bool super = std::isfinite(cfg.beta_star) && beta > cfg.beta_star;

  std::vector<SweepEntry> out;
  out.reserve(b_list.size());
  const MinimizeResult* prev = nullptr;
  double prev_b = 0.0;
  Field warm;
  for (double b : b_list) {
    FlowConfig c = cfg;
    if (prev) {
      // Rescale the previous minimizer about its peak by the predicted
      // blow-up ratio eps(prev)/eps(b).
      const double ratio = super ? std::sqrt(prev_b / b) : std::pow(prev_b / b, 1.0 / (pmax + 4.0));
      warm = rescale_about(prev->u, prev->max_x, prev->max_y, ratio);
      if (warm.l2_norm_sq() > 0.0) {
        warm.renormalize();
        c.init_kind = FlowConfig::Init::warm_start;
        c.warm_field = &warm;
      }
    }
    SweepEntry entry;
    entry.b = b;
    try {
      entry.result = minimize(grid, spec, b, beta, c);
      prev = &out.emplace_back(std::move(entry)).result;
      prev_b = b;
    } catch (const Error& err) {
      entry.failed = true;
      entry.error = err.what();
      out.push_back(std::move(entry));
      // keep the previous warm source; the sweep continues
    }
    if (on_entry) on_entry(out.back());
  }
  return out;
}

}  // namespace kminlab::minimizer
