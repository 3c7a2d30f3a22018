#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kminlab/geometry.hpp"
#include "kminlab/groundstate.hpp"
#include "kminlab/minimizer.hpp"

namespace kminlab::asymptotics {

enum class Regime { crit_interior, crit_boundary, super_interior, super_boundary };

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

/// Detect the regime from beta vs beta* and the well classification.
Regime detect_regime(double beta, double beta_star, const geometry::WellClassification& wc);

/// The limit constants of the four concentration regimes together with the
/// normalizers each observed quantity is divided by.
struct RegimePrediction {
  Regime regime = Regime::crit_interior;
  double p = 0, lambda = 0, kappa = 0, beta = 0, beta_star = 0;

  double energy_limit = 0;  // limit of (e - e_ref) / energy_normalizer
  double eps_limit = 0;     // limit of eps_b / eps_normalizer
  double dist_limit = 0;    // limit of |z - x0| / dist_normalizer

  std::string energy_normalizer_desc;
  std::string eps_normalizer_desc;
  std::string dist_normalizer_desc;

  /// ē(b) for the beta > beta* regimes, 0 otherwise.
  double energy_reference(double b) const;
  double energy_normalizer(double b) const;
  double eps_normalizer(double b) const;
  /// eps is measured in the beta = beta* regimes and closed-form in the
  /// beta > beta* regimes; callers pass the appropriate one.
  double dist_normalizer(double eps) const;
  /// (beta* b / (beta - beta*))^{1/2}; RegimeMismatch for beta <= beta*.
  double eps_closed_form(double b) const;
  /// The regime-appropriate eps for rescaling: measured for beta = beta*,
  /// closed-form for beta > beta*.
  double rescale_eps(double b, double eps_measured) const;
};

RegimePrediction predict(Regime regime, double p, double lambda, double kappa, double beta,
                         double beta_star);

struct ScalingFit {
  double exponent = 0;
  double log_power = 0;  // power of ln(2/b); 0 when disabled
  double prefactor = 0;
  double r_squared = 0;
  double b_min = 0, b_max = 0;
  int n_points = 0;
};

/// Least squares of ln|value| on ln b (and ln ln(2/b) when with_log).
ScalingFit fit_scaling(std::span<const std::pair<double, double>> sweep, bool with_log);

struct ProfileDistance {
  double l2_rel = 0;
  double h1_rel = 0;
  double outside_fraction = 0;   // share of the radius-10 window outside Omega
  bool window_clipped = false;   // outside_fraction > 0.5
};

/// Compares w(x) = eps * u(eps x + z) against Q(|x|)/sqrt(beta*) on a
/// radius-10 window about the peak. eps_override selects the closed-form
/// rate in the beta > beta* regimes; NaN uses the measured eps_b.
ProfileDistance profile_distance(
    const minimizer::MinimizeResult& result, const groundstate::RadialProfile& profile,
    double eps_override = std::numeric_limits<double>::quiet_NaN());

/// Discrete energy of the regime's trial function (cutoff-rescaled Q, with the
/// boundary construction shifted inward by (1+xi) R_tau along the normal).
/// A certified upper bound for the discrete e(b). The prediction supplies the
/// regime and the couplings.
double trial_upper_bound(const RegimePrediction& pred, const geometry::DomainGrid& grid,
                         const geometry::PotentialSpec& spec,
                         const groundstate::RadialProfile& profile, double b);

struct HMinimizerResult {
  double t0 = 0;      // numeric argmin of h(t) = a t^{-4} + gamma t^p ln(1/t)^p
  double h_t0 = 0;    // numeric minimum value
  double t0_asym = 0;   // small-a closed forms for comparison
  double h_asym = 0;
};

HMinimizerResult h_minimizer(double a, double gamma, double p);

struct BlowUpRow {
  double b = 0;
  double kinetic = 0;
  double kirchhoff_term = 0;  // b * kinetic^2
  double potential = 0;       // int V u^2
  double quartic_int = 0;     // int u^4
  double kin_over_rb = 0;     // beta > beta* only
  double quart_ratio = 0;     // int u^4 / (2 r_b / beta*)
  bool converged = false;
};

struct BlowUpTable {
  std::vector<BlowUpRow> rows;
  bool kinetic_increasing = false;   // along decreasing b
  bool kirchhoff_decreasing = false;
  bool potential_decreasing = false;
  bool has_super_ratios = false;
  bool trends_evaluated = false;  // false for single-row tables
};

BlowUpTable blow_up_diagnostics(std::span<const minimizer::SweepEntry> sweep, double beta,
                                double beta_star);

struct ReportRow {
  double b = 0;
  double e = 0;
  double e_normalized = 0;
  double predicted_limit = 0;
  double eps = 0;
  double eps_normalized = 0;
  double dist = 0;
  double dist_normalized = 0;
  double gn_ratio = 0;
  double trial_upper = 0;  // NaN when the trial scale precondition fails
  bool converged = false;
};

/// Normalized per-b rows for the report; dist is measured to the nearest
/// flattest interior well (interior regimes) or to the domain boundary
/// (boundary regimes).
std::vector<ReportRow> make_report(std::span<const minimizer::SweepEntry> sweep,
                                   const RegimePrediction& pred,
                                   const geometry::DomainGrid& grid,
                                   const geometry::PotentialSpec& spec,
                                   const groundstate::RadialProfile& profile);

}  // namespace kminlab::asymptotics
