#include "kminlab/energy.hpp"

#include <cmath>

#include "kminlab/errors.hpp"
#include "pairwise.hpp"

namespace kminlab::energy {

namespace {

void check_same_grid(const geometry::DomainGrid& a, const geometry::DomainGrid& b) {
  if (&a == &b) return;
  if (a.nx != b.nx || a.ny != b.ny || a.hx != b.hx || a.hy != b.hy || a.ox != b.ox ||
      a.oy != b.oy || a.n_interior != b.n_interior)
    throw GridMismatch("field and potential live on different grids");
}

}  // namespace

Field Field::zeros(std::shared_ptr<const geometry::DomainGrid> grid) {
  Field f;
  f.values.assign(grid->interior.size(), 0.0);
  f.grid = std::move(grid);
  return f;
}

void Field::apply_mask() {
  const auto& m = grid->interior;
  for (size_t k = 0; k < values.size(); ++k)
    if (!m[k]) values[k] = 0.0;
}

double Field::l2_norm_sq() const {
  const int ny = grid->ny, nx = grid->nx;
  std::vector<double> rows(ny, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* u = values.data() + static_cast<size_t>(j) * nx;
    double s = 0.0;
    for (int i = 0; i < nx; ++i) s += u[i] * u[i];
    rows[j] = s;
  }
  return grid->cell_area() * detail::pairwise_sum(rows);
}

double Field::l2_norm() const { return std::sqrt(l2_norm_sq()); }

void Field::renormalize() {
  const double n = l2_norm();
  if (n == 0.0) throw ZeroField("renormalize: zero field");
  const double inv = 1.0 / n;
  for (double& v : values) v *= inv;
}

double Field::mass_drift() const { return std::abs(l2_norm_sq() - 1.0); }

double kinetic_integral(const Field& u) {
  const auto& g = *u.grid;
  const int nx = g.nx, ny = g.ny;
  const double wx = g.hy / g.hx, wy = g.hx / g.hy;
  std::vector<double> rows(ny, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* row = u.values.data() + static_cast<size_t>(j) * nx;
    const double* up = (j + 1 < ny) ? row + nx : nullptr;
    double s = 0.0;
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = row[i + 1] - row[i];
      s += wx * d * d;
    }
    if (up) {
      for (int i = 0; i < nx; ++i) {
        const double d = up[i] - row[i];
        s += wy * d * d;
      }
    }
    rows[j] = s;
  }
  return detail::pairwise_sum(rows);
}

EnergyBreakdown evaluate(const Field& u, double b, double beta,
                         const geometry::PotentialSpec& spec) {
  check_same_grid(*u.grid, *spec.grid);
  if (b < 0.0 || beta < 0.0) throw DomainError("evaluate: b and beta must be >= 0");
  const auto& g = *u.grid;
  const int nx = g.nx, ny = g.ny;

  EnergyBreakdown e;
  e.kinetic = kinetic_integral(u);

  std::vector<double> pot_rows(ny, 0.0), quart_rows(ny, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* row = u.values.data() + static_cast<size_t>(j) * nx;
    const double* vrow = spec.values.data() + static_cast<size_t>(j) * nx;
    double sp = 0.0, sq = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double u2 = row[i] * row[i];
      sp += vrow[i] * u2;
      sq += u2 * u2;
    }
    pot_rows[j] = sp;
    quart_rows[j] = sq;
  }
  const double area = g.cell_area();
  e.potential = area * detail::pairwise_sum(pot_rows);
  e.u4_integral = area * detail::pairwise_sum(quart_rows);
  e.kirchhoff = 0.5 * b * e.kinetic * e.kinetic;
  e.quartic = 0.5 * beta * e.u4_integral;
  e.total = e.kinetic + e.kirchhoff + e.potential - e.quartic;
  e.mu = e.kinetic + e.potential + b * e.kinetic * e.kinetic - beta * e.u4_integral;
  return e;
}

Field gradient(const Field& u, double b, double beta, const geometry::PotentialSpec& spec) {
  check_same_grid(*u.grid, *spec.grid);
  const auto& g = *u.grid;
  const int nx = g.nx, ny = g.ny;
  const double k = kinetic_integral(u);
  const double c = 2.0 * (1.0 + b * k);
  const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);

  Field out = Field::zeros(u.grid);
  for (int j = 1; j + 1 < ny; ++j) {
    const double* row = u.values.data() + static_cast<size_t>(j) * nx;
    const double* rn = row - nx;
    const double* rp = row + nx;
    const double* vrow = spec.values.data() + static_cast<size_t>(j) * nx;
    const std::uint8_t* mrow = g.interior.data() + static_cast<size_t>(j) * nx;
    double* orow = out.values.data() + static_cast<size_t>(j) * nx;
    for (int i = 1; i + 1 < nx; ++i) {
      if (!mrow[i]) continue;
      const double lap = (row[i + 1] - 2.0 * row[i] + row[i - 1]) * ihx2 +
                         (rp[i] - 2.0 * row[i] + rn[i]) * ihy2;
      orow[i] = -c * lap + 2.0 * vrow[i] * row[i] - 2.0 * beta * row[i] * row[i] * row[i];
    }
  }
  return out;
}

BarEnergy bar_energy(double b, double beta, double beta_star) {
  if (!(b > 0.0)) throw DomainError("bar_energy: b must be > 0");
  if (!(beta > beta_star))
    throw DomainError("bar_energy: defined for beta > beta* only");
  const double s = (beta - beta_star) / beta_star;
  return {-0.5 / b * s * s, s / b};
}

double gn_ratio(const Field& u) {
  const double m = u.l2_norm_sq();
  if (m == 0.0) throw ZeroField("gn_ratio: zero field");
  const auto& g = *u.grid;
  const int nx = g.nx, ny = g.ny;
  std::vector<double> rows(ny, 0.0);
  for (int j = 0; j < ny; ++j) {
    const double* row = u.values.data() + static_cast<size_t>(j) * nx;
    double s = 0.0;
    for (int i = 0; i < nx; ++i) {
      const double u2 = row[i] * row[i];
      s += u2 * u2;
    }
    rows[j] = s;
  }
  const double quart = g.cell_area() * detail::pairwise_sum(rows);
  return quart / (kinetic_integral(u) * m);
}

}  // namespace kminlab::energy
