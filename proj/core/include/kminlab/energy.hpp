#pragma once

#include <memory>
#include <vector>

#include "kminlab/geometry.hpp"

namespace kminlab::energy {

/// Real-valued discrete function on a DomainGrid. Values are stored on the
/// full lattice with the Dirichlet convention: exactly zero outside the
/// interior mask.
struct Field {
  std::shared_ptr<const geometry::DomainGrid> grid;
  std::vector<double> values;  // nx*ny

  static Field zeros(std::shared_ptr<const geometry::DomainGrid> grid);

  double& at(int i, int j) { return values[grid->idx(i, j)]; }
  double at(int i, int j) const { return values[grid->idx(i, j)]; }

  void apply_mask();
  double l2_norm_sq() const;            // hx*hy * sum u^2
  double l2_norm() const;
  void renormalize();                   // scale to unit L2 norm (ZeroField if zero)
  double mass_drift() const;            // |int u^2 - 1|
};

/// E_b(u) split into its terms.
///   kinetic   = int |grad u|^2    (forward-difference edge sum)
///   kirchhoff = (b/2) kinetic^2
///   potential = int V u^2
///   quartic   = (beta/2) int u^4
///   total     = kinetic + kirchhoff + potential - quartic
///   mu        = kinetic + potential + b*kinetic^2 - beta * int u^4
struct EnergyBreakdown {
  double kinetic = 0;
  double kirchhoff = 0;
  double potential = 0;
  double quartic = 0;
  double total = 0;
  double mu = 0;
  double u4_integral = 0;  // int u^4 (kept raw so beta = 0 runs stay informative)
};

double kinetic_integral(const Field& u);

EnergyBreakdown evaluate(const Field& u, double b, double beta,
                         const geometry::PotentialSpec& spec);

/// Unconstrained L2 gradient g = -2 (1 + b int|grad u|^2) Lap_h u + 2 V u - 2 beta u^3.
Field gradient(const Field& u, double b, double beta, const geometry::PotentialSpec& spec);

struct BarEnergy {
  double value = 0;  // -(1/2b) ((beta-beta*)/beta*)^2
  double r_b = 0;    // (beta-beta*)/(b beta*)
};

/// Closed form of the whole-plane auxiliary problem, defined for beta > beta*.
BarEnergy bar_energy(double b, double beta, double beta_star);

/// (int u^4) / (int |grad u|^2 * int u^2); bounded by 2/beta* in the continuum.
double gn_ratio(const Field& u);

}  // namespace kminlab::energy
