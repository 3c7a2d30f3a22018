#include "kminlab/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "kminlab/errors.hpp"
#include "pairwise.hpp"

namespace kminlab::groundstate {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBlowUpThreshold = 50.0;

struct State {
  double q;
  double p;  // dq/dr
};

State rhs(double r, State s) {
  if (r == 0.0) return {s.p, 0.5 * (s.q - s.q * s.q * s.q)};
  return {s.p, -s.p / r + s.q - s.q * s.q * s.q};
}

State rk4_step(double r, double h, State s) {
  State k1 = rhs(r, s);
  State k2 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k1.q, s.p + 0.5 * h * k1.p});
  State k3 = rhs(r + 0.5 * h, {s.q + 0.5 * h * k2.q, s.p + 0.5 * h * k2.p});
  State k4 = rhs(r + h, {s.q + h * k3.q, s.p + h * k3.p});
  return {s.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
          s.p + h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
}

enum class Outcome { crossed, blew_up, stayed_positive };

// Forward RK4 with the r = 0 singularity removed by the series start
// Q(h) = Q0 + (Q0 - Q0^3) h^2/4.  Optionally records the trajectory.
Outcome shoot(double q0, double r_max, int n, std::vector<double>* qs, std::vector<double>* ps) {
  const double h = r_max / n;
  if (qs) {
    qs->assign(n + 1, 0.0);
    ps->assign(n + 1, 0.0);
    (*qs)[0] = q0;
  }
  State s{q0 + (q0 - q0 * q0 * q0) * h * h / 4.0, (q0 - q0 * q0 * q0) * h / 2.0};
  if (qs) {
    (*qs)[1] = s.q;
    (*ps)[1] = s.p;
  }
  for (int i = 1; i < n; ++i) {
    s = rk4_step(i * h, h, s);
    if (qs) {
      (*qs)[i + 1] = s.q;
      (*ps)[i + 1] = s.p;
    }
    if (s.q < 0.0) return Outcome::crossed;
    if (s.q > kBlowUpThreshold) return Outcome::blew_up;
  }
  return Outcome::stayed_positive;
}

// Crossing zero means the start had too much energy (Q0 above critical);
// staying positive means it turns back toward the Q = 1 equilibrium (too low).
bool is_high(double q0, double r_max, int n) {
  Outcome o = shoot(q0, r_max, n, nullptr, nullptr);
  return o != Outcome::stayed_positive;
}

// Two-term decay asymptotics Q ~ c r^{-1/2} e^{-r} (1 - 3/(8r)).
State asymptotic_tail(double c, double r) {
  const double base = std::pow(r, -0.5) * std::exp(-r);
  const double corr = 1.0 - 3.0 / (8.0 * r);
  const double q = c * base * corr;
  const double dq = c * std::exp(-r) *
                    (-std::pow(r, -0.5) * corr - 0.5 * std::pow(r, -1.5) * corr +
                     std::pow(r, -0.5) * 3.0 / (8.0 * r * r));
  return {q, dq};
}

// Backward integration from r_max down to index i_match (stable direction for
// the decaying branch). Fills qs/ps on [i_match, n].
void integrate_tail(double c, double r_max, int n, int i_match, std::vector<double>& qs,
                    std::vector<double>& ps) {
  const double h = r_max / n;
  State s = asymptotic_tail(c, r_max);
  qs[n] = s.q;
  ps[n] = s.p;
  for (int i = n; i > i_match; --i) {
    s = rk4_step(i * h, -h, s);
    qs[i - 1] = s.q;
    ps[i - 1] = s.p;
  }
}

// Composite trapezoid of f over the uniform grid plus the Euler-Maclaurin end
// term at r = 0 (the 2*pi*r Jacobian makes f'(0) nonzero for p = 0 moments;
// at r_max the derivative is exponentially small and dropped).
double radial_integral(std::span<const double> f, double h, double fprime0) {
  const double t = h * (detail::pairwise_sum(f) - 0.5 * (f.front() + f.back()));
  return t + h * h / 12.0 * fprime0;
}

}  // namespace

double RadialProfile::value_at(double r) const {
  if (r < 0.0) r = -r;
  if (r >= r_max) return 0.0;
  const double h = step();
  const auto i = static_cast<size_t>(r / h);
  if (i + 1 >= q_values.size()) return q_values.back();
  const double t = (r - r_nodes[i]) / h;
  return q_values[i] * (1.0 - t) + q_values[i + 1] * t;
}

double RadialProfile::deriv_at(double r) const {
  if (r < 0.0) r = -r;
  if (r >= r_max) return 0.0;
  const double h = step();
  const auto i = static_cast<size_t>(r / h);
  if (i + 1 >= q_prime.size()) return q_prime.back();
  const double t = (r - r_nodes[i]) / h;
  return q_prime[i] * (1.0 - t) + q_prime[i + 1] * t;
}

RadialProfile solve_ground_state(double r_max, int n_nodes, double shoot_tol) {
  if (r_max < 10.0) throw DomainError("solve_ground_state: r_max must be >= 10");
  if (n_nodes < 1000) throw DomainError("solve_ground_state: n_nodes must be >= 1000");
  if (!(shoot_tol > 0.0) || shoot_tol > 1e-3)
    throw DomainError("solve_ground_state: shoot_tol must be in (0, 1e-3]");

  const double h = r_max / n_nodes;
  // RK4 global error ~ h^4; demand it stays a safe factor under shoot_tol.
  if (h * h * h * h > 100.0 * shoot_tol)
    throw ResolutionError(fmt::format(
        "solve_ground_state: n_nodes={} too small for shoot_tol={:g} (h^4={:g})", n_nodes,
        shoot_tol, h * h * h * h));

  double lo = 1.0, hi = 10.0;
  if (is_high(lo, r_max, n_nodes) || !is_high(hi, r_max, n_nodes))
    throw NonConvergence("solve_ground_state: bisection bracket not established in [1, 10]");

  // Bisect to the requested tolerance, then keep going to machine precision;
  // the extra iterations are free compared to the integration cost.
  while (hi - lo > shoot_tol * lo) {
    const double mid = 0.5 * (lo + hi);
    (is_high(mid, r_max, n_nodes) ? hi : lo) = mid;
  }
  for (int i = 0; i < 64; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (is_high(mid, r_max, n_nodes) ? hi : lo) = mid;
  }
  const double q0 = 0.5 * (lo + hi);

  RadialProfile out;
  out.r_max = r_max;
  out.q_at_zero = q0;
  out.r_nodes.resize(n_nodes + 1);
  for (int i = 0; i <= n_nodes; ++i) out.r_nodes[i] = i * h;
  shoot(q0, r_max, n_nodes, &out.q_values, &out.q_prime);

  // Rebuild the tail from the matching radius outward: forward shooting error
  // grows like e^{+r} and would wreck the far samples, backward integration
  // of the decaying branch is stable.
  const double r_match = std::min(12.0, 0.5 * r_max);
  const int i_match = static_cast<int>(std::lround(r_match / h));
  double c = 1.0;
  std::vector<double> tq(n_nodes + 1, 0.0), tp(n_nodes + 1, 0.0);
  for (int pass = 0; pass < 2; ++pass) {
    integrate_tail(c, r_max, n_nodes, i_match, tq, tp);
    c *= out.q_values[i_match] / tq[i_match];
  }
  integrate_tail(c, r_max, n_nodes, i_match, tq, tp);
  for (int i = i_match; i <= n_nodes; ++i) {
    out.q_values[i] = tq[i];
    out.q_prime[i] = tp[i];
  }

  const size_t m = out.q_values.size();
  std::vector<double> f(m);
  for (size_t i = 0; i < m; ++i)
    f[i] = 2.0 * kPi * out.r_nodes[i] * out.q_values[i] * out.q_values[i];
  out.mass = radial_integral(f, h, 2.0 * kPi * q0 * q0);
  for (size_t i = 0; i < m; ++i)
    f[i] = 2.0 * kPi * out.r_nodes[i] * out.q_prime[i] * out.q_prime[i];
  out.grad_norm = radial_integral(f, h, 0.0);
  for (size_t i = 0; i < m; ++i) {
    const double q2 = out.q_values[i] * out.q_values[i];
    f[i] = 2.0 * kPi * out.r_nodes[i] * q2 * q2;
  }
  out.quartic = radial_integral(f, h, 2.0 * kPi * q0 * q0 * q0 * q0);
  return out;
}

double moment(const RadialProfile& profile, double p) {
  return moment_checked(profile, p).value;
}

MomentDiagnostics moment_checked(const RadialProfile& profile, double p) {
  if (p < 0.0) throw DomainError("moment: p must be >= 0");
  if (profile.q_values.empty()) throw DomainError("moment: empty profile");
  const double h = profile.step();
  const size_t m = profile.q_values.size();
  std::vector<double> f(m);
  for (size_t i = 0; i < m; ++i) {
    const double r = profile.r_nodes[i];
    f[i] = 2.0 * kPi * std::pow(r, p + 1.0) * profile.q_values[i] * profile.q_values[i];
  }
  // The r = 0 end correction vanishes for p > 0: d/dr [r^{p+1} Q^2] -> 0.
  const double fp0 = (p == 0.0) ? 2.0 * kPi * profile.q_at_zero * profile.q_at_zero : 0.0;
  MomentDiagnostics d;
  d.value = radial_integral(f, h, fp0);
  const size_t i90 = (m * 9) / 10;
  d.tail_fraction = radial_integral(std::span(f).subspan(i90), h, 0.0) / d.value;
  d.truncated = d.tail_fraction > 1e-6;
  return d;
}

MomentTable moment_table(const RadialProfile& profile, std::span<const double> exponents) {
  MomentTable t;
  t.entries[0.0] = moment(profile, 0.0);
  for (double p : exponents) t.entries[p] = moment(profile, p);
  return t;
}

double lambda_constant(double kappa_i, double p, const MomentTable& moments) {
  if (!(kappa_i > 0.0)) throw DomainError("lambda_constant: kappa_i must be > 0");
  if (!(p > 0.0)) throw DomainError("lambda_constant: p must be > 0");
  if (!moments.has(p))
    throw DomainError(fmt::format("lambda_constant: moment table lacks p={:g}", p));
  const double mp = moments.entries.at(p);
  return std::pow(p * kappa_i * mp / (2.0 * moments.beta_star()), 1.0 / (p + 2.0));
}

}  // namespace kminlab::groundstate
