#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kminlab/groundstate.hpp"

namespace kminlab::geometry {

enum class ShapeTag { rectangle, disk, polygon_mask };

/// Domain descriptor. Rectangle (ax,bx)x(ay,by), disk (center, radius), or an
/// explicit boolean mask with its own lattice metadata.
struct Shape {
  ShapeTag tag = ShapeTag::rectangle;
  double ax = 0, bx = 1, ay = 0, by = 1;
  double cx = 0, cy = 0, radius = 1;
  int mask_nx = 0, mask_ny = 0;
  double mask_ox = 0, mask_oy = 0;
  std::vector<std::uint8_t> mask;
  // The interior ball condition is assumed for rectangle/disk; explicit masks
  // carry this flag as a recorded assertion, not a verified property.
  bool assume_interior_ball = true;

  static Shape rectangle(double ax, double bx, double ay, double by);
  static Shape disk(double cx, double cy, double radius);
  static Shape polygon_mask(int nx, int ny, double ox, double oy, std::vector<std::uint8_t> mask,
                            bool assume_interior_ball);
};

/// Masked uniform grid over the bounding box of the shape. Node (i,j) sits at
/// (ox + i*hx, oy + j*hy); interior nodes are the Dirichlet degrees of freedom
/// (fields vanish on all other nodes).
struct DomainGrid {
  int nx = 0, ny = 0;
  double hx = 0, hy = 0;
  double ox = 0, oy = 0;
  std::vector<std::uint8_t> interior;  // nx*ny, row-major in j
  ShapeTag shape_tag = ShapeTag::rectangle;
  Shape shape;
  int n_interior = 0;

  int idx(int i, int j) const { return j * nx + i; }
  bool is_interior(int i, int j) const {
    return i >= 0 && j >= 0 && i < nx && j < ny && interior[idx(i, j)] != 0;
  }
  double x(int i) const { return ox + hx * i; }
  double y(int j) const { return oy + hy * j; }
  double cell_area() const { return hx * hy; }

  /// Distance from a point to the domain boundary (exact for rectangle and
  /// disk, mask-front distance with edge interpolation for explicit masks).
  double boundary_distance(double px, double py) const;
  /// Unit outward normal of the boundary point nearest to (px, py).
  void outward_normal(double px, double py, double& nx_out, double& ny_out) const;
  /// Nearest interior node distance (used for well containment checks).
  double nearest_interior_node_distance(double px, double py) const;
};

DomainGrid build_grid(const Shape& shape, double resolution);
std::shared_ptr<const DomainGrid> build_grid_shared(const Shape& shape, double resolution);

struct Well {
  double x = 0, y = 0;
  double p = 1;  // exponent, > 0
};

/// The bounded factor h(x) of the potential. Catalog: constant c, or
/// 1 + amp * exp(-|x-c|^2 / (2 w^2)) so kappa_i stays closed-form.
struct HKind {
  enum class Kind { constant, bump };
  Kind kind = Kind::constant;
  double c = 1.0;
  double amp = 0.0, bx = 0.0, by = 0.0, width = 1.0;

  double eval(double px, double py) const;
  std::string to_string() const;
  static HKind parse(const std::string& text);  // "const:<c>" | "bump:<amp>,<cx>,<cy>,<w>"
};

/// V(x) = h(x) * prod_i |x - x_i|^{p_i} sampled at interior nodes.
struct PotentialSpec {
  std::shared_ptr<const DomainGrid> grid;
  std::vector<Well> wells;
  HKind h_kind;
  std::vector<double> values;  // nx*ny, zero outside the interior mask

  double eval_continuum(double px, double py) const;
};

PotentialSpec sample_potential(std::shared_ptr<const DomainGrid> grid, std::vector<Well> wells,
                               HKind h_kind);

/// V identically zero (no wells); used by the eigenvalue sanity runs.
PotentialSpec zero_potential(std::shared_ptr<const DomainGrid> grid);

/// Flattest-well bookkeeping: p = max p_i, Z1/Z0 the flattest wells strictly
/// inside / on the boundary, kappa_i = h(x_i) prod_{j!=i} |x_i-x_j|^{p_j}.
struct WellClassification {
  double p = 0;
  std::vector<int> z1;
  std::vector<int> z0;
  std::vector<double> kappa_each;
  double kappa = 0;                 // min over flattest wells
  std::optional<double> lambda;     // min lambda_i over Z1; absent when Z1 empty
};

WellClassification classify_wells(const PotentialSpec& spec, const DomainGrid& grid,
                                  const groundstate::RadialProfile& profile);

}  // namespace kminlab::geometry
