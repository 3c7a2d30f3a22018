#include "kminlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <queue>

#include "kminlab/errors.hpp"

namespace kminlab::geometry {

namespace {

int count_components(const DomainGrid& g) {
  std::vector<std::uint8_t> seen(g.interior.size(), 0);
  int components = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!g.is_interior(i, j) || seen[g.idx(i, j)]) continue;
      ++components;
      std::queue<std::pair<int, int>> q;
      q.push({i, j});
      seen[g.idx(i, j)] = 1;
      while (!q.empty()) {
        auto [ci, cj] = q.front();
        q.pop();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          int ni = ci + di[k], nj = cj + dj[k];
          if (g.is_interior(ni, nj) && !seen[g.idx(ni, nj)]) {
            seen[g.idx(ni, nj)] = 1;
            q.push({ni, nj});
          }
        }
      }
    }
  }
  return components;
}

}  // namespace

Shape Shape::rectangle(double ax, double bx, double ay, double by) {
  Shape s;
  s.tag = ShapeTag::rectangle;
  s.ax = ax;
  s.bx = bx;
  s.ay = ay;
  s.by = by;
  return s;
}

Shape Shape::disk(double cx, double cy, double radius) {
  Shape s;
  s.tag = ShapeTag::disk;
  s.cx = cx;
  s.cy = cy;
  s.radius = radius;
  return s;
}

Shape Shape::polygon_mask(int nx, int ny, double ox, double oy, std::vector<std::uint8_t> mask,
                          bool assume_interior_ball) {
  Shape s;
  s.tag = ShapeTag::polygon_mask;
  s.mask_nx = nx;
  s.mask_ny = ny;
  s.mask_ox = ox;
  s.mask_oy = oy;
  s.mask = std::move(mask);
  s.assume_interior_ball = assume_interior_ball;
  return s;
}

double DomainGrid::boundary_distance(double px, double py) const {
  switch (shape_tag) {
    case ShapeTag::rectangle: {
      const double dx = std::min(px - shape.ax, shape.bx - px);
      const double dy = std::min(py - shape.ay, shape.by - py);
      return std::min(dx, dy);
    }
    case ShapeTag::disk:
      return shape.radius - std::hypot(px - shape.cx, py - shape.cy);
    case ShapeTag::polygon_mask: {
      // Distance to the mask front: midpoints of interior/exterior edges.
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
          if (!is_interior(i, j)) continue;
          const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
          for (int k = 0; k < 4; ++k) {
            if (!is_interior(i + di[k], j + dj[k])) {
              const double fx = x(i) + 0.5 * di[k] * hx;
              const double fy = y(j) + 0.5 * dj[k] * hy;
              best = std::min(best, std::hypot(px - fx, py - fy));
            }
          }
        }
      }
      return best;
    }
  }
  return 0.0;
}

void DomainGrid::outward_normal(double px, double py, double& nx_out, double& ny_out) const {
  switch (shape_tag) {
    case ShapeTag::disk: {
      const double dx = px - shape.cx, dy = py - shape.cy;
      const double n = std::hypot(dx, dy);
      if (n == 0.0) {
        nx_out = 1.0;
        ny_out = 0.0;
        return;
      }
      nx_out = dx / n;
      ny_out = dy / n;
      return;
    }
    case ShapeTag::rectangle: {
      const double d[4] = {px - shape.ax, shape.bx - px, py - shape.ay, shape.by - py};
      const int k = static_cast<int>(std::min_element(d, d + 4) - d);
      const double normals[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
      nx_out = normals[k][0];
      ny_out = normals[k][1];
      return;
    }
    case ShapeTag::polygon_mask: {
      // Central differences of the boundary distance.
      const double d = std::max(hx, hy);
      const double gx = boundary_distance(px + d, py) - boundary_distance(px - d, py);
      const double gy = boundary_distance(px, py + d) - boundary_distance(px, py - d);
      const double n = std::hypot(gx, gy);
      nx_out = n > 0 ? -gx / n : 1.0;
      ny_out = n > 0 ? -gy / n : 0.0;
      return;
    }
  }
}

double DomainGrid::nearest_interior_node_distance(double px, double py) const {
  double best = std::numeric_limits<double>::infinity();
  // Restrict the scan to a window around the point; fall back to full scan
  // when the window misses (point far outside).
  const int i0 = std::clamp(static_cast<int>((px - ox) / hx) - 3, 0, nx - 1);
  const int j0 = std::clamp(static_cast<int>((py - oy) / hy) - 3, 0, ny - 1);
  for (int j = j0; j < std::min(ny, j0 + 7); ++j)
    for (int i = i0; i < std::min(nx, i0 + 7); ++i)
      if (is_interior(i, j)) best = std::min(best, std::hypot(px - x(i), py - y(j)));
  if (std::isfinite(best)) return best;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (is_interior(i, j)) best = std::min(best, std::hypot(px - x(i), py - y(j)));
  return best;
}

DomainGrid build_grid(const Shape& shape, double resolution) {
  if (!(resolution > 0.0)) throw DomainError("build_grid: resolution must be > 0");
  DomainGrid g;
  g.shape = shape;
  g.shape_tag = shape.tag;

  switch (shape.tag) {
    case ShapeTag::rectangle: {
      if (!(shape.bx > shape.ax) || !(shape.by > shape.ay))
        throw DomainError("build_grid: degenerate rectangle");
      g.nx = static_cast<int>(std::lround((shape.bx - shape.ax) / resolution)) + 1;
      g.ny = static_cast<int>(std::lround((shape.by - shape.ay) / resolution)) + 1;
      g.hx = (shape.bx - shape.ax) / (g.nx - 1);
      g.hy = (shape.by - shape.ay) / (g.ny - 1);
      g.ox = shape.ax;
      g.oy = shape.ay;
      g.interior.assign(static_cast<size_t>(g.nx) * g.ny, 0);
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) g.interior[g.idx(i, j)] = 1;
      break;
    }
    case ShapeTag::disk: {
      if (!(shape.radius > 0.0)) throw DomainError("build_grid: radius must be > 0");
      const int half = static_cast<int>(std::lround(shape.radius / resolution));
      g.nx = g.ny = 2 * half + 1;
      g.hx = g.hy = shape.radius / std::max(half, 1);
      g.ox = shape.cx - half * g.hx;
      g.oy = shape.cy - half * g.hy;
      g.interior.assign(static_cast<size_t>(g.nx) * g.ny, 0);
      const double r2 = shape.radius * shape.radius * (1.0 - 1e-14);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double dx = g.x(i) - shape.cx, dy = g.y(j) - shape.cy;
          if (dx * dx + dy * dy < r2) g.interior[g.idx(i, j)] = 1;
        }
      break;
    }
    case ShapeTag::polygon_mask: {
      g.nx = shape.mask_nx;
      g.ny = shape.mask_ny;
      g.hx = g.hy = resolution;
      g.ox = shape.mask_ox;
      g.oy = shape.mask_oy;
      if (static_cast<int>(shape.mask.size()) != g.nx * g.ny)
        throw DomainError("build_grid: mask size mismatch");
      g.interior = shape.mask;
      // Strip mask nodes on the index boundary: every interior node must have
      // its four neighbors addressable.
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) g.interior[g.idx(i, j)] = 0;
      break;
    }
  }

  g.n_interior = static_cast<int>(std::count(g.interior.begin(), g.interior.end(), 1));
  if (g.n_interior == 0) throw EmptyDomain("build_grid: no interior nodes");
  if (count_components(g) != 1)
    throw DisconnectedDomain("build_grid: interior mask has more than one component");
  return g;
}

std::shared_ptr<const DomainGrid> build_grid_shared(const Shape& shape, double resolution) {
  return std::make_shared<const DomainGrid>(build_grid(shape, resolution));
}

double HKind::eval(double px, double py) const {
  if (kind == Kind::constant) return c;
  const double dx = px - bx, dy = py - by;
  return 1.0 + amp * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
}

std::string HKind::to_string() const {
  if (kind == Kind::constant) return fmt::format("const:{:g}", c);
  return fmt::format("bump:{:g},{:g},{:g},{:g}", amp, bx, by, width);
}

HKind HKind::parse(const std::string& text) {
  HKind h;
  if (text.rfind("const:", 0) == 0) {
    h.kind = Kind::constant;
    try {
      h.c = std::stod(text.substr(6));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("potential.h: bad constant in '{}'", text));
    }
    if (!(h.c > 0.0)) throw ConfigError("potential.h: constant must be > 0");
    return h;
  }
  if (text.rfind("bump:", 0) == 0) {
    h.kind = Kind::bump;
    double v[4];
    size_t pos = 5;
    for (int k = 0; k < 4; ++k) {
      size_t next = 0;
      try {
        v[k] = std::stod(text.substr(pos), &next);
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("potential.h: bad bump parameters in '{}'", text));
      }
      pos += next;
      if (k < 3) {
        if (pos >= text.size() || text[pos] != ',')
          throw ConfigError(fmt::format("potential.h: bump needs amp,cx,cy,w in '{}'", text));
        ++pos;
      }
    }
    h.amp = v[0];
    h.bx = v[1];
    h.by = v[2];
    h.width = v[3];
    if (!(h.width > 0.0)) throw ConfigError("potential.h: bump width must be > 0");
    if (h.amp <= -1.0) throw ConfigError("potential.h: bump amp must keep h positive");
    return h;
  }
  throw ConfigError(fmt::format("potential.h: unknown h kind '{}'", text));
}

double PotentialSpec::eval_continuum(double px, double py) const {
  double v = h_kind.eval(px, py);
  for (const Well& w : wells) v *= std::pow(std::hypot(px - w.x, py - w.y), w.p);
  return v;
}

PotentialSpec sample_potential(std::shared_ptr<const DomainGrid> grid, std::vector<Well> wells,
                               HKind h_kind) {
  if (!grid) throw DomainError("sample_potential: null grid");
  if (wells.empty()) throw DomainError("sample_potential: at least one well required");
  for (const Well& w : wells)
    if (!(w.p > 0.0)) throw DomainError("sample_potential: well exponents must be > 0");
  for (size_t a = 0; a < wells.size(); ++a)
    for (size_t b = a + 1; b < wells.size(); ++b)
      if (wells[a].x == wells[b].x && wells[a].y == wells[b].y)
        throw DomainError("sample_potential: wells must be pairwise distinct");
  for (const Well& w : wells) {
    const bool outside =
        grid->shape_tag == ShapeTag::polygon_mask
            ? grid->nearest_interior_node_distance(w.x, w.y) > grid->hx + grid->hy
            : grid->boundary_distance(w.x, w.y) < -grid->hx;
    if (outside)
      throw WellOutsideClosure(
          fmt::format("sample_potential: well ({:g},{:g}) lies outside the domain", w.x, w.y));
  }

  PotentialSpec spec;
  spec.grid = grid;
  spec.wells = std::move(wells);
  spec.h_kind = h_kind;
  spec.values.assign(grid->interior.size(), 0.0);
  for (int j = 0; j < grid->ny; ++j) {
    for (int i = 0; i < grid->nx; ++i) {
      if (!grid->is_interior(i, j)) continue;
      const double px = grid->x(i), py = grid->y(j);
      double v = h_kind.eval(px, py);
      for (const Well& w : spec.wells) {
        const double d = std::hypot(px - w.x, py - w.y);
        v *= std::pow(d, w.p);  // exactly zero at a node coinciding with a well
      }
      spec.values[grid->idx(i, j)] = v;
    }
  }
  return spec;
}

PotentialSpec zero_potential(std::shared_ptr<const DomainGrid> grid) {
  if (!grid) throw DomainError("zero_potential: null grid");
  PotentialSpec spec;
  spec.values.assign(grid->interior.size(), 0.0);
  spec.grid = std::move(grid);
  return spec;
}

WellClassification classify_wells(const PotentialSpec& spec, const DomainGrid& grid,
                                  const groundstate::RadialProfile& profile) {
  if (spec.wells.empty()) throw DomainError("classify_wells: no wells");
  WellClassification c;
  for (const Well& w : spec.wells) c.p = std::max(c.p, w.p);

  c.kappa_each.resize(spec.wells.size());
  for (size_t i = 0; i < spec.wells.size(); ++i) {
    double k = spec.h_kind.eval(spec.wells[i].x, spec.wells[i].y);
    for (size_t j = 0; j < spec.wells.size(); ++j) {
      if (j == i) continue;
      k *= std::pow(std::hypot(spec.wells[i].x - spec.wells[j].x,
                               spec.wells[i].y - spec.wells[j].y),
                    spec.wells[j].p);
    }
    c.kappa_each[i] = k;
  }

  const double h = std::max(grid.hx, grid.hy);
  c.kappa = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < spec.wells.size(); ++i) {
    if (spec.wells[i].p != c.p) continue;
    const double d = grid.boundary_distance(spec.wells[i].x, spec.wells[i].y);
    if (d > 2.0 * h) {
      c.z1.push_back(static_cast<int>(i));
    } else if (d <= 0.5 * grid.hx * (1.0 + 1e-9)) {
      c.z0.push_back(static_cast<int>(i));
    } else {
      throw AmbiguousBoundary(fmt::format(
          "classify_wells: flattest well ({:g},{:g}) sits {:g} from the boundary, "
          "inside the 2h margin but not on it",
          spec.wells[i].x, spec.wells[i].y, d));
    }
    c.kappa = std::min(c.kappa, c.kappa_each[i]);
  }
  if (c.z1.empty() && c.z0.empty())
    throw DomainError("classify_wells: no flattest well classified");

  if (!c.z1.empty()) {
    const double exps[1] = {c.p};
    const auto table = groundstate::moment_table(profile, exps);
    double best = std::numeric_limits<double>::infinity();
    for (int i : c.z1)
      best = std::min(best, groundstate::lambda_constant(c.kappa_each[i], c.p, table));
    c.lambda = best;
  }
  return c;
}

}  // namespace kminlab::geometry
