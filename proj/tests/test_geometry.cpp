#include <doctest.h>

#include <cmath>

#include "kminlab/errors.hpp"
#include "kminlab/geometry.hpp"
#include "kminlab/groundstate.hpp"

using namespace kminlab;
using geometry::HKind;
using geometry::Shape;
using geometry::Well;

namespace {
const groundstate::RadialProfile& profile() {
  static auto p = groundstate::solve_ground_state(20.0, 8000, 1e-10);
  return p;
}
}  // namespace

TEST_CASE("unit square at h=1/64 has 63x63 interior nodes") {
  const auto g = geometry::build_grid(Shape::rectangle(0, 1, 0, 1), 1.0 / 64);
  CHECK(g.nx == 65);
  CHECK(g.ny == 65);
  CHECK(g.n_interior == 63 * 63);
  CHECK(g.hx == doctest::Approx(1.0 / 64));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.is_interior(i, j)) {
        CHECK(g.is_interior(i + 1, j) + g.is_interior(i - 1, j) >= 0);  // neighbors addressable
        CHECK(i > 0);
        CHECK(j > 0);
        CHECK(i < g.nx - 1);
        CHECK(j < g.ny - 1);
      }
}

TEST_CASE("unit disk interior node count approximates pi/h^2") {
  const double h = 1.0 / 64;
  const auto g = geometry::build_grid(Shape::disk(0, 0, 1), h);
  const double expected = 3.14159265358979 / (h * h);
  CHECK(std::abs(g.n_interior - expected) / expected < 0.03);
}

TEST_CASE("degenerate and disconnected domains") {
  CHECK_THROWS_AS(geometry::build_grid(Shape::disk(0, 0, 0.01), 1.0 / 32), EmptyDomain);
  // two separated blobs in an explicit mask
  const int n = 16;
  std::vector<std::uint8_t> mask(n * n, 0);
  for (int j = 4; j <= 6; ++j)
    for (int i = 4; i <= 6; ++i) mask[j * n + i] = 1;
  for (int j = 10; j <= 12; ++j)
    for (int i = 10; i <= 12; ++i) mask[j * n + i] = 1;
  CHECK_THROWS_AS(
      geometry::build_grid(Shape::polygon_mask(n, n, 0, 0, mask, true), 1.0 / 16),
      DisconnectedDomain);
}

TEST_CASE("sample_potential single centered well") {
  auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 64);
  auto spec = geometry::sample_potential(g, {{0.5, 0.5, 2.0}}, HKind{});
  const double h = 1.0 / 64;
  // corner-adjacent interior node
  const double vx = spec.values[g->idx(1, 1)];
  const double d2 = (h - 0.5) * (h - 0.5) * 2.0;
  CHECK(vx == doctest::Approx(d2).epsilon(1e-14));
  // nonnegative everywhere, zero exactly at the well node
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i) CHECK(spec.values[g->idx(i, j)] >= 0.0);
  CHECK(spec.values[g->idx(32, 32)] == 0.0);
}

TEST_CASE("two wells vanish only at the wells") {
  auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 32);
  auto spec =
      geometry::sample_potential(g, {{0.25, 0.5, 1.0}, {0.75, 0.5, 2.0}}, HKind{});
  int zeros = 0;
  for (int j = 0; j < g->ny; ++j)
    for (int i = 0; i < g->nx; ++i)
      if (g->is_interior(i, j) && spec.values[g->idx(i, j)] == 0.0) ++zeros;
  CHECK(zeros == 2);
}

TEST_CASE("h scaling is linear") {
  auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 32);
  HKind h1;
  h1.c = 1.0;
  HKind h2;
  h2.c = 2.0;
  auto s1 = geometry::sample_potential(g, {{0.5, 0.5, 2.0}}, h1);
  auto s2 = geometry::sample_potential(g, {{0.5, 0.5, 2.0}}, h2);
  for (size_t k = 0; k < s1.values.size(); ++k)
    CHECK(s2.values[k] == doctest::Approx(2.0 * s1.values[k]).epsilon(1e-15));
}

TEST_CASE("potential preconditions") {
  auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 32);
  CHECK_THROWS_AS(geometry::sample_potential(g, {{0.5, 0.5, -1.0}}, HKind{}), DomainError);
  CHECK_THROWS_AS(geometry::sample_potential(g, {{0.5, 0.5, 1.0}, {0.5, 0.5, 2.0}}, HKind{}),
                  DomainError);
  CHECK_THROWS_AS(geometry::sample_potential(g, {{2.0, 2.0, 1.0}}, HKind{}),
                  WellOutsideClosure);
}

TEST_CASE("HKind parse and eval") {
  const auto c = HKind::parse("const:2.5");
  CHECK(c.eval(0.3, -1.0) == 2.5);
  const auto bump = HKind::parse("bump:0.5,0,0,0.3");
  CHECK(bump.eval(0, 0) == doctest::Approx(1.5));
  CHECK(bump.eval(10, 10) == doctest::Approx(1.0));
  CHECK(HKind::parse(bump.to_string()).eval(0.1, 0.2) == doctest::Approx(bump.eval(0.1, 0.2)));
  CHECK_THROWS_AS(HKind::parse("exp:1"), ConfigError);
  CHECK_THROWS_AS(HKind::parse("const:0"), ConfigError);
  CHECK_THROWS_AS(HKind::parse("bump:1,2"), ConfigError);
}

TEST_CASE("classify_wells: interior, boundary, and mixed exponents") {
  SUBCASE("one interior well") {
    auto g = geometry::build_grid_shared(Shape::disk(0, 0, 1), 1.0 / 64);
    auto spec = geometry::sample_potential(g, {{0, 0, 2.0}}, HKind{});
    const auto wc = geometry::classify_wells(spec, *g, profile());
    CHECK(wc.p == 2.0);
    CHECK(wc.z1 == std::vector<int>{0});
    CHECK(wc.z0.empty());
    CHECK(wc.kappa == doctest::Approx(1.0).epsilon(1e-15));
    REQUIRE(wc.lambda.has_value());
    const double m2 = groundstate::moment(profile(), 2.0);
    CHECK(*wc.lambda == doctest::Approx(std::pow(m2 / profile().mass, 0.25)).epsilon(1e-12));
  }
  SUBCASE("rim well on the disk") {
    auto g = geometry::build_grid_shared(Shape::disk(0, 0, 1), 1.0 / 64);
    auto spec = geometry::sample_potential(g, {{1.0, 0.0, 2.0}}, HKind{});
    const auto wc = geometry::classify_wells(spec, *g, profile());
    CHECK(wc.z1.empty());
    CHECK(wc.z0 == std::vector<int>{0});
    CHECK_FALSE(wc.lambda.has_value());
  }
  SUBCASE("flattest selection excludes lower exponents") {
    auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 64);
    auto spec =
        geometry::sample_potential(g, {{0.3, 0.5, 1.0}, {0.7, 0.5, 2.0}}, HKind{});
    const auto wc = geometry::classify_wells(spec, *g, profile());
    CHECK(wc.p == 2.0);
    CHECK(wc.z1 == std::vector<int>{1});
    // kappa of the flattest well carries the other well's distance factor
    CHECK(wc.kappa == doctest::Approx(0.4).epsilon(1e-12));
  }
  SUBCASE("ambiguous boundary distance is flagged") {
    auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 64);
    auto spec = geometry::sample_potential(g, {{0.5, 1.0 / 64, 2.0}}, HKind{});
    CHECK_THROWS_AS(geometry::classify_wells(spec, *g, profile()), AmbiguousBoundary);
  }
}

TEST_CASE("classification is invariant under rigid translation") {
  const double h = 1.0 / 48;
  auto g1 = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), h);
  auto g2 = geometry::build_grid_shared(Shape::rectangle(0.25, 1.25, -0.5, 0.5), h);
  auto s1 = geometry::sample_potential(g1, {{0.5, 0.5, 2.0}, {0.25, 0.25, 1.0}}, HKind{});
  auto s2 = geometry::sample_potential(g2, {{0.75, 0.0, 2.0}, {0.5, -0.25, 1.0}}, HKind{});
  const auto c1 = geometry::classify_wells(s1, *g1, profile());
  const auto c2 = geometry::classify_wells(s2, *g2, profile());
  CHECK(c1.p == c2.p);
  CHECK(c1.z1 == c2.z1);
  CHECK(c1.z0 == c2.z0);
  CHECK(c1.kappa == doctest::Approx(c2.kappa).epsilon(1e-12));
  CHECK(*c1.lambda == doctest::Approx(*c2.lambda).epsilon(1e-12));
}

TEST_CASE("potential values are Holder-bounded on the grid") {
  auto g = geometry::build_grid_shared(Shape::rectangle(0, 1, 0, 1), 1.0 / 32);
  auto spec = geometry::sample_potential(g, {{0.5, 0.5, 0.5}}, HKind{});
  const double alpha = 0.5;  // min(1, min p_i)
  // L estimated from nearest-neighbor pairs, then checked on long-range pairs
  double L = 0.0;
  for (int j = 1; j + 1 < g->ny; ++j)
    for (int i = 1; i + 2 < g->nx; ++i)
      if (g->is_interior(i, j) && g->is_interior(i + 1, j))
        L = std::max(L, std::abs(spec.values[g->idx(i + 1, j)] - spec.values[g->idx(i, j)]) /
                            std::pow(g->hx, alpha));
  for (int k = 1; k < 30; ++k) {
    const int i1 = 1 + (7 * k) % (g->nx - 2), j1 = 1 + (11 * k) % (g->ny - 2);
    const int i2 = 1 + (13 * k) % (g->nx - 2), j2 = 1 + (5 * k) % (g->ny - 2);
    if (!g->is_interior(i1, j1) || !g->is_interior(i2, j2) || (i1 == i2 && j1 == j2)) continue;
    const double dist = std::hypot((i1 - i2) * g->hx, (j1 - j2) * g->hy);
    const double dv = std::abs(spec.values[g->idx(i1, j1)] - spec.values[g->idx(i2, j2)]);
    CHECK(dv <= 2.0 * L * std::pow(dist, alpha) + 1e-12);
  }
}

TEST_CASE("boundary distance and outward normal") {
  const auto g = geometry::build_grid(Shape::disk(0, 0, 1), 1.0 / 32);
  CHECK(g.boundary_distance(0, 0) == doctest::Approx(1.0));
  CHECK(g.boundary_distance(0.5, 0) == doctest::Approx(0.5));
  double nx = 0, ny = 0;
  g.outward_normal(0.9, 0.0, nx, ny);
  CHECK(nx == doctest::Approx(1.0));
  CHECK(ny == doctest::Approx(0.0));
  const auto r = geometry::build_grid(Shape::rectangle(0, 2, 0, 1), 1.0 / 16);
  CHECK(r.boundary_distance(1.0, 0.25) == doctest::Approx(0.25));
  r.outward_normal(1.0, 0.1, nx, ny);
  CHECK(ny == doctest::Approx(-1.0));
}
