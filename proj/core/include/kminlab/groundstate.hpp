#pragma once

#include <map>
#include <span>
#include <vector>

namespace kminlab::groundstate {

/// Radial ground state Q of  Q'' + Q'/r - Q + Q^3 = 0,  Q'(0) = 0,  Q -> 0,
/// sampled on a uniform grid over [0, r_max] together with its norms.
/// mass = int Q^2 over the plane (this is the critical coupling beta*),
/// grad_norm = int |grad Q|^2, quartic = int Q^4; all with the 2*pi*r Jacobian.
struct RadialProfile {
  std::vector<double> r_nodes;
  std::vector<double> q_values;
  std::vector<double> q_prime;
  double r_max = 0.0;
  double mass = 0.0;
  double grad_norm = 0.0;
  double quartic = 0.0;
  double q_at_zero = 0.0;

  double step() const { return r_nodes.size() > 1 ? r_nodes[1] - r_nodes[0] : 0.0; }

  /// Piecewise-linear Q(r); zero beyond r_max.
  double value_at(double r) const;
  /// Piecewise-linear Q'(r); zero beyond r_max.
  double deriv_at(double r) const;
};

/// Cached moments m_p = int |x|^p Q^2 dx over the plane. Always contains p = 0
/// (which equals beta* = mass).
struct MomentTable {
  std::map<double, double> entries;

  double beta_star() const { return entries.at(0.0); }
  bool has(double p) const { return entries.count(p) > 0; }
};

/// Shooting solve for the ground state. Bisects Q(0) inside [1, 10]:
/// too-high starts cross zero at finite radius, too-low starts turn back
/// toward the Q = 1 equilibrium. The far tail is rebuilt by backward
/// integration from the decay asymptotics and amplitude-matched to the
/// forward solution, which keeps the sampled tail on the r^{-1/2} e^{-r}
/// branch instead of the diverging shooting error.
///
/// Throws NonConvergence if the bracket cannot be established and
/// ResolutionError if n_nodes cannot support shoot_tol.
RadialProfile solve_ground_state(double r_max, int n_nodes, double shoot_tol);

/// m_p = 2*pi int r^{p+1} Q(r)^2 dr by the corrected trapezoid rule.
double moment(const RadialProfile& profile, double p);

struct MomentDiagnostics {
  double value = 0.0;
  double tail_fraction = 0.0;  // contribution of the last 10% of radii
  bool truncated = false;      // tail_fraction > 1e-6: r_max too small for this p
};
MomentDiagnostics moment_checked(const RadialProfile& profile, double p);

MomentTable moment_table(const RadialProfile& profile, std::span<const double> exponents);

/// lambda_i = (p * kappa_i * m_p / (2 beta*))^{1/(p+2)}.
double lambda_constant(double kappa_i, double p, const MomentTable& moments);

}  // namespace kminlab::groundstate
