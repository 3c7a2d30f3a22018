#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "kminlab/energy.hpp"

namespace kminlab::minimizer {

struct FlowConfig {
  double step0 = 0.0;        // 0 = CFL-derived h^2/8/(1 + b*K)
  int max_iters = 400000;
  double energy_tol = 1e-10;  // relative stall tolerance over stall_window iterations
  double grad_tol = 1e-5;     // projected-gradient L2 norm
  double backtracking = 0.5;
  int stall_window = 50;

  // Descent metric. The Helmholtz preconditioner (c I - Lap_h)^{-1} with
  // c = int|grad u|^2 removes the 1/h^2 stiffness of the plain L2 step; the
  // energy landscape, stopping tests, and all result contracts are identical.
  enum class Precond { none, helmholtz };
  Precond precond = Precond::helmholtz;
  int precond_iters = 25;  // fixed CG iteration count (deterministic)

  enum class Init { gaussian_at_point, eigenmode, warm_start };
  Init init_kind = Init::gaussian_at_point;
  double init_cx = std::numeric_limits<double>::quiet_NaN();  // NaN = flattest well
  double init_cy = std::numeric_limits<double>::quiet_NaN();
  double init_width = std::numeric_limits<double>::quiet_NaN();  // NaN = auto
  const energy::Field* warm_field = nullptr;

  std::uint64_t seed = 0;

  // beta* for the b = 0 ill-posedness guard; NaN restricts the solver to b > 0.
  double beta_star = std::numeric_limits<double>::quiet_NaN();

  // Scale-relaxation move: every scale_move_every accepted steps, a golden
  // section search over rescalings of u about its peak. Directly relaxes the
  // soft dilation mode that plain explicit flow leaves nearly frozen near
  // beta = beta*. 0 disables.
  int scale_move_every = 37;

  // History-direction extrapolation: every extrapolate_every accepted steps,
  // an exact line search along u - u_snapshot (the accumulated slow
  // direction), accepted only on energy decrease. 0 disables.
  int extrapolate_every = 40;

  bool record_history = true;
};

struct MinimizeResult {
  energy::Field u;
  energy::EnergyBreakdown breakdown;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
  double max_x = 0, max_y = 0;  // sub-grid peak location z_b
  double max_value = 0;
  double eps_b = 0;             // (int |grad u|^2)^{-1/2}
  double grad_norm = 0;         // final projected-gradient norm
  double constraint_drift = 0;  // |int u^2 - 1|
  std::vector<double> history;  // accepted energies
};

/// Normalized gradient flow: v = u - tau*g, renormalized to the unit L2
/// sphere, accepted only on energy decrease (halving tau otherwise).
/// Stops on grad_tol, or on relative energy stall over stall_window
/// iterations. Sign-fixed so the peak is positive.
MinimizeResult minimize(std::shared_ptr<const geometry::DomainGrid> grid,
                        const geometry::PotentialSpec& spec, double b, double beta,
                        const FlowConfig& cfg);

struct SweepEntry {
  double b = 0;
  MinimizeResult result;
  bool failed = false;
  std::string error;
};

/// Runs minimize over a decreasing b list, warm-starting each entry from the
/// previous minimizer rescaled about its peak by the predicted blow-up ratio.
/// Per-entry failures are recorded and the sweep continues. on_entry (when
/// set) fires after each entry completes, in order.
std::vector<SweepEntry> continuation_sweep(
    std::shared_ptr<const geometry::DomainGrid> grid, const geometry::PotentialSpec& spec,
    double beta, std::span<const double> b_list, const FlowConfig& cfg,
    const std::function<void(const SweepEntry&)>& on_entry = {});

/// Rescale u about (cx, cy): w(x) = s * u(z + s (x - z)) by bilinear sampling,
/// clipped to the mask. The warm-start and scale-move primitive.
energy::Field rescale_about(const energy::Field& u, double cx, double cy, double s);

/// Gaussian bump exp(-|x-c|^2 / (2 w^2)) masked and normalized.
energy::Field gaussian_init(std::shared_ptr<const geometry::DomainGrid> grid, double cx, double cy,
                            double width);

/// Positive product-sine bump on the bounding box, masked and normalized
/// (the exact principal eigenmode on rectangles, a generic positive init
/// elsewhere).
energy::Field eigenmode_init(std::shared_ptr<const geometry::DomainGrid> grid);

}  // namespace kminlab::minimizer
