#include "kminlab/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>

#include "kminlab/energy.hpp"
#include "kminlab/errors.hpp"
#include "pairwise.hpp"

namespace kminlab::asymptotics {

using energy::Field;
using geometry::DomainGrid;
using geometry::PotentialSpec;
using groundstate::RadialProfile;
using minimizer::MinimizeResult;
using minimizer::SweepEntry;

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::crit_interior: return "CRIT_INTERIOR";
    case Regime::crit_boundary: return "CRIT_BOUNDARY";
    case Regime::super_interior: return "SUPER_INTERIOR";
    case Regime::super_boundary: return "SUPER_BOUNDARY";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "CRIT_INTERIOR") return Regime::crit_interior;
  if (name == "CRIT_BOUNDARY") return Regime::crit_boundary;
  if (name == "SUPER_INTERIOR") return Regime::super_interior;
  if (name == "SUPER_BOUNDARY") return Regime::super_boundary;
  throw ConfigError(fmt::format("unknown regime '{}'", name));
}

Regime detect_regime(double beta, double beta_star, const geometry::WellClassification& wc) {
  const bool interior = !wc.z1.empty();
  if (std::abs(beta - beta_star) <= 1e-9 * beta_star)
    return interior ? Regime::crit_interior : Regime::crit_boundary;
  if (beta > beta_star) return interior ? Regime::super_interior : Regime::super_boundary;
  throw RegimeMismatch("detect_regime: the concentration regimes require beta >= beta*");
}

double RegimePrediction::energy_reference(double b) const {
  if (regime == Regime::super_interior || regime == Regime::super_boundary)
    return energy::bar_energy(b, beta, beta_star).value;
  return 0.0;
}

double RegimePrediction::eps_closed_form(double b) const {
  if (!(beta > beta_star))
    throw RegimeMismatch("eps_closed_form: defined for beta > beta* only");
  return std::sqrt(beta_star * b / (beta - beta_star));
}

double RegimePrediction::energy_normalizer(double b) const {
  switch (regime) {
    case Regime::crit_interior:
      return std::pow(b, p / (p + 4.0));
    case Regime::crit_boundary:
      return std::pow(b, p / (p + 4.0)) * std::pow(std::log(2.0 / b), 4.0 * p / (p + 4.0));
    case Regime::super_interior:
      return std::pow(eps_closed_form(b), p);
    case Regime::super_boundary: {
      const double e = eps_closed_form(b);
      return std::pow(e, p) * std::pow(std::abs(std::log(e)), p);
    }
  }
  return 1.0;
}

double RegimePrediction::eps_normalizer(double b) const {
  switch (regime) {
    case Regime::crit_interior:
      return std::pow(b, 1.0 / (p + 4.0));
    case Regime::crit_boundary:
      // The boundary rate carries an inverse log factor: eps ~ t0(b/2) of the
      // h(t) analysis, t0 ~ a^{1/(p+4)} ln(1/a)^{-p/(p+4)}.
      return std::pow(b, 1.0 / (p + 4.0)) * std::pow(std::log(2.0 / b), -p / (p + 4.0));
    case Regime::super_interior:
    case Regime::super_boundary:
      return eps_closed_form(b);
  }
  return 1.0;
}

double RegimePrediction::dist_normalizer(double eps) const {
  switch (regime) {
    case Regime::crit_interior:
    case Regime::super_interior:
      return eps;
    case Regime::crit_boundary:
    case Regime::super_boundary:
      return eps * std::abs(std::log(eps));
  }
  return 1.0;
}

double RegimePrediction::rescale_eps(double b, double eps_measured) const {
  if (regime == Regime::super_interior || regime == Regime::super_boundary)
    return eps_closed_form(b);
  return eps_measured;
}

RegimePrediction predict(Regime regime, double p, double lambda, double kappa, double beta,
                         double beta_star) {
  if (!(p > 0.0)) throw DomainError("predict: p must be > 0");
  if (!(beta_star > 0.0)) throw DomainError("predict: beta_star must be > 0");
  const bool super = regime == Regime::super_interior || regime == Regime::super_boundary;
  const bool interior = regime == Regime::crit_interior || regime == Regime::super_interior;
  if (super && !(beta > beta_star))
    throw RegimeMismatch("predict: SUPER_* regimes require beta > beta*");
  if (!super && std::abs(beta - beta_star) > 1e-9 * beta_star)
    throw RegimeMismatch("predict: CRIT_* regimes require beta = beta*");
  if (interior && !(lambda > 0.0))
    throw RegimeMismatch("predict: interior regimes require lambda > 0 (Z1 nonempty)");
  if (!interior && !(kappa > 0.0))
    throw RegimeMismatch("predict: boundary regimes require kappa > 0");

  RegimePrediction out;
  out.regime = regime;
  out.p = p;
  out.lambda = lambda;
  out.kappa = kappa;
  out.beta = beta;
  out.beta_star = beta_star;

  switch (regime) {
    case Regime::crit_interior:
      // min over tau of (b/2) tau^4 + (2 lambda^{p+2}/p) tau^{-p}
      //   = (1/2 + 2/p) lambda^{4(p+2)/(p+4)} b^{p/(p+4)}.
      out.energy_limit = (p + 4.0) / (2.0 * p) * std::pow(lambda, 4.0 * (p + 2.0) / (p + 4.0));
      out.eps_limit = std::pow(lambda, -(p + 2.0) / (p + 4.0));
      out.dist_limit = 0.0;
      out.energy_normalizer_desc = "b^(p/(p+4))";
      out.eps_normalizer_desc = "b^(1/(p+4))";
      out.dist_normalizer_desc = "eps_b";
      break;
    case Regime::crit_boundary: {
      const double bracket =
          std::pow(p / 4.0, 4.0 / (p + 4.0)) + std::pow(4.0 / p, p / (p + 4.0));
      out.energy_limit = std::pow(kappa, 4.0 / (p + 4.0)) *
                         std::pow(2.0, -5.0 * p / (p + 4.0)) *
                         std::pow((p + 2.0) / (p + 4.0), 4.0 * p / (p + 4.0)) * bracket;
      out.eps_limit = std::pow(std::pow(2.0, p + 1.0) / (p * kappa), 1.0 / (p + 4.0)) *
                      std::pow((p + 4.0) / (p + 2.0), p / (p + 4.0));
      out.dist_limit = 0.5 * (p + 2.0);
      out.energy_normalizer_desc = "b^(p/(p+4)) * ln(2/b)^(4p/(p+4))";
      out.eps_normalizer_desc = "b^(1/(p+4)) * ln(2/b)^(-p/(p+4))";
      out.dist_normalizer_desc = "eps_b * |ln eps_b|";
      break;
    }
    case Regime::super_interior:
      out.energy_limit = 2.0 * std::pow(lambda, p + 2.0) / p;
      out.eps_limit = 1.0;
      out.dist_limit = 0.0;
      out.energy_normalizer_desc = "(e - ebar); eps^p with eps = (beta* b/(beta-beta*))^(1/2)";
      out.eps_normalizer_desc = "(beta* b/(beta-beta*))^(1/2)";
      out.dist_normalizer_desc = "eps";
      break;
    case Regime::super_boundary:
      out.energy_limit = kappa * std::pow(0.5 * (p + 2.0), p);
      out.eps_limit = 1.0;
      out.dist_limit = 0.5 * (p + 2.0);
      out.energy_normalizer_desc = "(e - ebar); eps^p |ln eps|^p";
      out.eps_normalizer_desc = "(beta* b/(beta-beta*))^(1/2)";
      out.dist_normalizer_desc = "eps * |ln eps|";
      break;
  }
  return out;
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> sweep, bool with_log) {
  if (sweep.size() < 4) throw DegenerateFit("fit_scaling: need at least 4 points");
  double sign = 0.0;
  for (auto& [b, v] : sweep) {
    if (!(b > 0.0)) throw DomainError("fit_scaling: b values must be positive");
    if (v == 0.0) throw DomainError("fit_scaling: zero values are not fittable");
    if (sign == 0.0) sign = v > 0 ? 1.0 : -1.0;
    if (v * sign < 0.0) throw DomainError("fit_scaling: values must have one sign");
  }

  const int n = static_cast<int>(sweep.size());
  const int k = with_log ? 3 : 2;
  // Normal equations for ln|v| = c0 + c1 ln b + c2 ln ln(2/b).
  std::array<std::array<double, 4>, 3> m{};
  for (auto& row : m) row.fill(0.0);
  for (auto& [b, v] : sweep) {
    const double x1 = std::log(b);
    const double x2 = with_log ? std::log(std::log(2.0 / b)) : 0.0;
    const double y = std::log(std::abs(v));
    const double xs[3] = {1.0, x1, x2};
    for (int r = 0; r < k; ++r) {
      for (int c2 = 0; c2 < k; ++c2) m[r][c2] += xs[r] * xs[c2];
      m[r][3] += xs[r] * y;
    }
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < k; ++col) {
    int piv = col;
    for (int r = col + 1; r < k; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    if (std::abs(m[col][col]) < 1e-12 * n)
      throw DegenerateFit("fit_scaling: rank-deficient design matrix");
    for (int r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c2 = col; c2 < 4; ++c2) m[r][c2] -= f * m[col][c2];
    }
  }
  double coef[3] = {0, 0, 0};
  for (int r = 0; r < k; ++r) coef[r] = m[r][3] / m[r][r];

  double ymean = 0.0;
  for (auto& [b, v] : sweep) ymean += std::log(std::abs(v));
  ymean /= n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (auto& [b, v] : sweep) {
    const double y = std::log(std::abs(v));
    const double x2 = with_log ? std::log(std::log(2.0 / b)) : 0.0;
    const double fit = coef[0] + coef[1] * std::log(b) + coef[2] * x2;
    ss_res += (y - fit) * (y - fit);
    ss_tot += (y - ymean) * (y - ymean);
  }

  ScalingFit out;
  out.exponent = coef[1];
  out.log_power = with_log ? coef[2] : 0.0;
  out.prefactor = sign * std::exp(coef[0]);
  out.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  out.n_points = n;
  auto [bmin, bmax] = std::minmax_element(
      sweep.begin(), sweep.end(), [](auto& a, auto& b2) { return a.first < b2.first; });
  out.b_min = bmin->first;
  out.b_max = bmax->first;
  return out;
}

ProfileDistance profile_distance(const MinimizeResult& result, const RadialProfile& profile,
                                 double eps_override) {
  if (!result.converged)
    throw DomainError("profile_distance: result did not converge");
  const double eps = std::isfinite(eps_override) ? eps_override : result.eps_b;
  const double zx = result.max_x, zy = result.max_y;
  const auto& g = *result.u.grid;
  const double inv_sqrt_bs = 1.0 / std::sqrt(profile.mass);

  constexpr double kWindow = 10.0;
  constexpr int kHalf = 160;  // 321x321 window samples
  const double d = kWindow / kHalf;

  // w sampled on the window; NaN marks points outside Omega.
  const int nw = 2 * kHalf + 1;
  std::vector<double> w(static_cast<size_t>(nw) * nw, 0.0);
  std::vector<std::uint8_t> inside(w.size(), 0);
  size_t n_out = 0;
  for (int j = 0; j < nw; ++j) {
    for (int i = 0; i < nw; ++i) {
      const double xr = (i - kHalf) * d, yr = (j - kHalf) * d;
      const double px = zx + eps * xr, py = zy + eps * yr;
      bool in;
      if (g.shape_tag == geometry::ShapeTag::polygon_mask) {
        const int ni = static_cast<int>(std::lround((px - g.ox) / g.hx));
        const int nj = static_cast<int>(std::lround((py - g.oy) / g.hy));
        in = g.is_interior(ni, nj);
      } else {
        in = g.boundary_distance(px, py) > 0.0;
      }
      if (!in) {
        ++n_out;
        continue;
      }
      inside[static_cast<size_t>(j) * nw + i] = 1;
      // bilinear sample of u
      const double fi = (px - g.ox) / g.hx, fj = (py - g.oy) / g.hy;
      const int i0 = static_cast<int>(std::floor(fi)), j0 = static_cast<int>(std::floor(fj));
      double val = 0.0;
      if (i0 >= 0 && j0 >= 0 && i0 + 1 < g.nx && j0 + 1 < g.ny) {
        const double tx = fi - i0, ty = fj - j0;
        const double* row = result.u.values.data() + static_cast<size_t>(j0) * g.nx + i0;
        val = (1 - tx) * (1 - ty) * row[0] + tx * (1 - ty) * row[1] +
              (1 - tx) * ty * row[g.nx] + tx * ty * row[g.nx + 1];
      }
      w[static_cast<size_t>(j) * nw + i] = eps * val;
    }
  }

  double num_l2 = 0.0, den_l2 = 0.0, num_h1 = 0.0, den_h1 = 0.0;
  for (int j = 0; j < nw; ++j) {
    for (int i = 0; i < nw; ++i) {
      const size_t k = static_cast<size_t>(j) * nw + i;
      if (!inside[k]) continue;
      const double xr = (i - kHalf) * d, yr = (j - kHalf) * d;
      const double r = std::hypot(xr, yr);
      const double qr = profile.value_at(r) * inv_sqrt_bs;
      num_l2 += (w[k] - qr) * (w[k] - qr);
      den_l2 += qr * qr;
      if (i > 0 && j > 0 && i + 1 < nw && j + 1 < nw && inside[k - 1] && inside[k + 1] &&
          inside[k - nw] && inside[k + nw]) {
        const double wx = (w[k + 1] - w[k - 1]) / (2 * d);
        const double wy = (w[k + nw] - w[k - nw]) / (2 * d);
        const double qp = profile.deriv_at(r) * inv_sqrt_bs;
        const double qx = r > 0 ? qp * xr / r : 0.0;
        const double qy = r > 0 ? qp * yr / r : 0.0;
        num_h1 += (wx - qx) * (wx - qx) + (wy - qy) * (wy - qy);
        den_h1 += qx * qx + qy * qy;
      }
    }
  }

  ProfileDistance out;
  out.l2_rel = den_l2 > 0 ? std::sqrt(num_l2 / den_l2) : 0.0;
  out.h1_rel = den_h1 > 0 ? std::sqrt(num_h1 / den_h1) : 0.0;
  out.outside_fraction = static_cast<double>(n_out) / (static_cast<double>(nw) * nw);
  out.window_clipped = out.outside_fraction > 0.5;
  return out;
}

namespace {

// C^2 quintic blend: 1 for t <= 0, 0 for t >= 1.
double smooth_cutoff(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

}  // namespace

double trial_upper_bound(const RegimePrediction& pred, const DomainGrid& grid,
                         const PotentialSpec& spec, const RadialProfile& profile, double b) {
  if (!(b > 0.0)) throw DomainError("trial_upper_bound: b must be > 0");
  const double beta_star = profile.mass;
  const auto wc = geometry::classify_wells(spec, grid, profile);
  const double p = wc.p;
  const double diam = std::hypot((grid.nx - 1) * grid.hx, (grid.ny - 1) * grid.hy);
  const double h = std::max(grid.hx, grid.hy);

  const bool interior = pred.regime == Regime::crit_interior || pred.regime == Regime::super_interior;
  const bool super = pred.regime == Regime::super_interior || pred.regime == Regime::super_boundary;

  // Flattest well with the smallest kappa on the regime's side.
  const auto& side = interior ? wc.z1 : wc.z0;
  if (side.empty())
    throw RegimeMismatch(fmt::format("trial_upper_bound: regime {} needs {} flattest wells",
                                     regime_name(pred.regime), interior ? "interior" : "boundary"));
  int iw = side[0];
  for (int i : side)
    if (wc.kappa_each[i] < wc.kappa_each[iw]) iw = i;
  const double kappa_i = wc.kappa_each[iw];
  const geometry::Well well = spec.wells[iw];

  double tau;
  if (super) {
    tau = std::sqrt((pred.beta - beta_star) / (beta_star * b));
  } else if (pred.regime == Regime::crit_interior) {
    const double exps[1] = {p};
    const auto table = groundstate::moment_table(profile, exps);
    const double lam_i = groundstate::lambda_constant(kappa_i, p, table);
    tau = std::pow(lam_i, (p + 2.0) / (p + 4.0)) * std::pow(b, -1.0 / (p + 4.0));
  } else {
    tau = std::pow(p * kappa_i / std::pow(2.0, p + 1.0), 1.0 / (p + 4.0)) *
          std::pow((p + 2.0) / (p + 4.0), p / (p + 4.0)) * std::pow(b, -1.0 / (p + 4.0)) *
          std::pow(std::log(2.0 / b), p / (p + 4.0));
  }
  if (!(tau >= 10.0 / diam))
    throw DomainError(fmt::format(
        "trial_upper_bound: b={:g} too large, tau={:g} below 10/diam={:g}", b, tau, 10.0 / diam));

  Field f = Field::zeros(spec.grid);
  if (interior) {
    const double r_out = grid.boundary_distance(well.x, well.y);
    if (r_out <= 2.0 * h)
      throw TrialOutsideDomain("trial_upper_bound: interior well too close to the boundary");
    const double r_in = 0.5 * r_out;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.is_interior(i, j)) continue;
        const double s = std::hypot(grid.x(i) - well.x, grid.y(j) - well.y);
        const double psi = smooth_cutoff((s - r_in) / (r_out - r_in));
        if (psi == 0.0) continue;
        f.values[grid.idx(i, j)] = psi * profile.value_at(tau * s);
      }
  } else {
    if (std::log(tau) <= 1.0)
      throw DomainError("trial_upper_bound: tau too small for the boundary construction");
    const double r_tau = 0.5 * (p + 2.0) * std::log(tau) / tau;
    const double xi = 1.0 / std::sqrt(std::log(tau));
    double nxv, nyv;
    grid.outward_normal(well.x, well.y, nxv, nyv);
    const double cx = well.x - (1.0 + xi) * r_tau * nxv;
    const double cy = well.y - (1.0 + xi) * r_tau * nyv;
    if (grid.boundary_distance(cx, cy) < (1.0 + xi) * r_tau - h)
      throw TrialOutsideDomain(
          "trial_upper_bound: shifted cutoff ball does not fit inside the domain");
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!grid.is_interior(i, j)) continue;
        const double s = std::hypot(grid.x(i) - cx, grid.y(j) - cy);
        const double psi = smooth_cutoff((s / r_tau - 1.0) / xi);
        if (psi == 0.0) continue;
        f.values[grid.idx(i, j)] = psi * profile.value_at(tau * s);
      }
  }
  f.renormalize();
  return energy::evaluate(f, b, pred.beta, spec).total;
}

HMinimizerResult h_minimizer(double a, double gamma, double p) {
  if (!(a > 0.0) || !(gamma > 0.0) || !(p > 0.0))
    throw DomainError("h_minimizer: a, gamma, p must be > 0");
  const double t_hi = 1.0 / (std::exp(1.0) + 1.0);
  auto h = [&](double t) {
    const double L = std::log(1.0 / t);
    return a * std::pow(t, -4.0) + gamma * std::pow(t, p) * std::pow(L, p);
  };
  // Interior-minimum check: h must already be increasing at the right edge.
  auto hprime = [&](double t) {
    const double L = std::log(1.0 / t);
    return -4.0 * a * std::pow(t, -5.0) +
           gamma * p * std::pow(t, p - 1.0) * std::pow(L, p - 1.0) * (L - 1.0);
  };
  if (!(hprime(t_hi * (1.0 - 1e-9)) > 0.0))
    throw BracketFailure(fmt::format(
        "h_minimizer: no interior minimum in (0, 1/(e+1)) for a={:g}, gamma={:g}, p={:g}", a,
        gamma, p));

  // Golden section on ln t; h is unimodal on the interval.
  double lo = std::log(1e-14), hi = std::log(t_hi * (1.0 - 1e-12));
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
  double f1 = h(std::exp(c1)), f2 = h(std::exp(c2));
  while (hi - lo > 1e-13) {
    if (f1 < f2) {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - phi * (hi - lo);
      f1 = h(std::exp(c1));
    } else {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + phi * (hi - lo);
      f2 = h(std::exp(c2));
    }
  }
  HMinimizerResult out;
  out.t0 = std::exp(0.5 * (lo + hi));
  out.h_t0 = h(out.t0);
  const double la = std::log(1.0 / a);
  out.t0_asym = std::pow(4.0 / (p * gamma), 1.0 / (p + 4.0)) * std::pow(p + 4.0, p / (p + 4.0)) *
                std::pow(a, 1.0 / (p + 4.0)) * std::pow(la, -p / (p + 4.0));
  out.h_asym = std::pow(gamma, 4.0 / (p + 4.0)) * std::pow(1.0 / (p + 4.0), 4.0 * p / (p + 4.0)) *
               (std::pow(p / 4.0, 4.0 / (p + 4.0)) + std::pow(4.0 / p, p / (p + 4.0))) *
               std::pow(a, p / (p + 4.0)) * std::pow(la, 4.0 * p / (p + 4.0));
  return out;
}

BlowUpTable blow_up_diagnostics(std::span<const SweepEntry> sweep, double beta,
                                double beta_star) {
  BlowUpTable t;
  const bool super = beta > beta_star * (1.0 + 1e-12);
  t.has_super_ratios = super;
  for (const auto& e : sweep) {
    BlowUpRow row;
    row.b = e.b;
    row.converged = !e.failed && e.result.converged;
    if (!e.failed) {
      const auto& bd = e.result.breakdown;
      row.kinetic = bd.kinetic;
      row.kirchhoff_term = e.b * bd.kinetic * bd.kinetic;
      row.potential = bd.potential;
      row.quartic_int = bd.u4_integral;
      if (super) {
        const double rb = energy::bar_energy(e.b, beta, beta_star).r_b;
        row.kin_over_rb = bd.kinetic / rb;
        row.quart_ratio = bd.u4_integral / (2.0 * rb / beta_star);
      }
    }
    t.rows.push_back(row);
  }
  // Trend flags along decreasing b over converged rows.
  std::vector<const BlowUpRow*> conv;
  for (const auto& r : t.rows)
    if (r.converged) conv.push_back(&r);
  if (conv.size() >= 2) {
    t.trends_evaluated = true;
    t.kinetic_increasing = true;
    t.kirchhoff_decreasing = true;
    t.potential_decreasing = true;
    for (size_t i = 1; i < conv.size(); ++i) {
      if (!(conv[i]->kinetic > conv[i - 1]->kinetic)) t.kinetic_increasing = false;
      if (!(conv[i]->kirchhoff_term < conv[i - 1]->kirchhoff_term))
        t.kirchhoff_decreasing = false;
      if (!(conv[i]->potential < conv[i - 1]->potential)) t.potential_decreasing = false;
    }
  }
  return t;
}

std::vector<ReportRow> make_report(std::span<const SweepEntry> sweep,
                                   const RegimePrediction& pred, const DomainGrid& grid,
                                   const PotentialSpec& spec, const RadialProfile& profile) {
  const auto wc = geometry::classify_wells(spec, grid, profile);
  const bool interior =
      pred.regime == Regime::crit_interior || pred.regime == Regime::super_interior;
  std::vector<ReportRow> rows;
  for (const auto& e : sweep) {
    ReportRow r;
    r.b = e.b;
    r.predicted_limit = pred.energy_limit;
    r.converged = !e.failed && e.result.converged;
    if (!e.failed) {
      const auto& bd = e.result.breakdown;
      r.e = bd.total;
      r.e_normalized = (bd.total - pred.energy_reference(e.b)) / pred.energy_normalizer(e.b);
      r.eps = e.result.eps_b;
      r.eps_normalized = r.eps / pred.eps_normalizer(e.b);
      if (interior) {
        double best = std::numeric_limits<double>::infinity();
        for (int i : wc.z1)
          best = std::min(best, std::hypot(e.result.max_x - spec.wells[i].x,
                                           e.result.max_y - spec.wells[i].y));
        r.dist = best;
      } else {
        r.dist = grid.boundary_distance(e.result.max_x, e.result.max_y);
      }
      const double eps_for_dist = pred.rescale_eps(e.b, r.eps);
      r.dist_normalized = r.dist / pred.dist_normalizer(eps_for_dist);
      r.gn_ratio = bd.u4_integral / bd.kinetic;  // unit mass
      try {
        r.trial_upper = trial_upper_bound(pred, grid, spec, profile, e.b);
      } catch (const Error&) {
        r.trial_upper = std::numeric_limits<double>::quiet_NaN();
      }
    } else {
      r.e = r.e_normalized = r.eps = r.eps_normalized = r.dist = r.dist_normalized =
          r.gn_ratio = r.trial_upper = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace kminlab::asymptotics
