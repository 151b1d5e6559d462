#include <gtest/gtest.h>

#include <cmath>

#include "impes/error.hpp"
#include "impes/manufactured.hpp"
#include "impes/pressure.hpp"
#include "impes/simulation.hpp"
#include "impes/velocity.hpp"

using namespace impes;

TEST(Rt0, ReproducesAffineRadialField) {
  const Grid g(3, 3, Rect{0.0, 0.0, 3.0, 3.0});
  // u = (1 + 0.5 x, -2 + 0.5 y): div u = 1 on every element.
  auto u = [](Point x) { return Point{1.0 + 0.5 * x.x, -2.0 + 0.5 * x.y}; };
  std::vector<std::array<double, 4>> fluxes(g.num_elements());
  std::vector<double> src(g.num_elements(), 1.0);
  const std::array<Point, 4> normals{Point{0, -1}, Point{1, 0}, Point{0, 1}, Point{-1, 0}};
  for (int e = 0; e < g.num_elements(); ++e) {
    const auto c = g.element_corners(e);
    for (int k = 0; k < 4; ++k) {
      // u.n is linear along the edge: the midpoint rule is exact.
      fluxes[e][k] = dot(u(midpoint(c[k], c[(k + 1) % 4])), normals[k]);
    }
  }
  const FluxField f(g, fluxes, src, 1);
  EXPECT_LT(f.conservation_mismatch(), 1e-15);
  EXPECT_LT(f.balance_error(), 1e-15);
  for (int e = 0; e < g.num_elements(); ++e) {
    EXPECT_NEAR(f.divergence(g, e), 1.0, 1e-14);
    const Rect r = g.element_rect(e);
    for (Point x : {Point{r.x0 + 0.2, r.y0 + 0.9}, r.center()}) {
      EXPECT_NEAR(norm(f.velocity(g, e, x) - u(x)), 0.0, 1e-14);
    }
  }
}

TEST(Rt0, MismatchDetected) {
  const Grid g(2, 2, Rect{0.0, 0.0, 2.0, 2.0});
  std::vector<std::array<double, 4>> fluxes{
      {0.0, 1.0, 0.0, -1.0}, {0.0, 1.0, 0.0, -0.5}, {0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}};
  const FluxField f(g, fluxes, {0.0, 0.0, 0.0, 0.0}, 1);
  EXPECT_NEAR(f.conservation_mismatch(), 0.5, 1e-15);
  EXPECT_NEAR(f.balance_error(), 0.5, 1e-15);
}

TEST(Recovery, ConservativeOnManufacturedCases) {
  for (const std::string id : {"ex1", "ex2", "ex3a", "ex3b"}) {
    const ManufacturedCase c = make_case(id);
    for (int n : {8, 16, 32}) {
      const Grid g(n, n, c.domain);
      const InterfaceGeometry geo = classify_elements(g, LevelSet{c.level_set});
      VertexScalarField s = VertexScalarField::constant(g, 0.0);
      for (int v = 0; v < g.num_vertices(); ++v) s.values[v] = c.saturation(g.vertex(v), 0.5).v;
      const CoefficientField coef(g, geo, c.permeability, c.fluid, s);
      const BasisSet bases(g, geo, coef);
      PressureData data;
      data.dirichlet = [&](Point x) { return c.pressure(x, 0.5).v; };
      data.source_integrals.assign(g.num_elements(), 0.0);
      for (int e = 0; e < g.num_elements(); ++e) {
        for (const QuadPoint& q : source_points(g, e)) {
          data.source_integrals[e] += q.w * c.sources(q.x, 0.5).total;
        }
      }
      const PressureSystem sys = assemble_pressure(g, geo, bases, coef, data);
      const PressureSolution p = solve_pressure(sys, {SolverKind::Cholesky, 1e-12, 100});
      const FluxField f = recover_velocity(g, sys, p);
      EXPECT_LE(f.conservation_mismatch(), 1e-9) << id << " n=" << n;
      EXPECT_LE(f.balance_error(), 1e-10) << id << " n=" << n;
    }
  }
}

TEST(Recovery, StalePressureIsAContractError) {
  const Grid g(4, 4, Rect{0.0, 0.0, 1.0, 1.0});
  const InterfaceGeometry geo = uniform_geometry(g);
  const FluidModel fluid;
  const VertexScalarField s = VertexScalarField::constant(g, 0.5);
  const CoefficientField coef(g, geo, Permeability{}, fluid, s);
  const BasisSet b1(g, geo, coef), b2(g, geo, coef);
  PressureData data;
  data.dirichlet = [](Point x) { return x.x; };
  const PressureSystem s1 = assemble_pressure(g, geo, b1, coef, data);
  const PressureSystem s2 = assemble_pressure(g, geo, b2, coef, data);
  const PressureSolution p1 = solve_pressure(s1);
  try {
    recover_velocity(g, s2, p1);
    FAIL() << "expected a contract error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::Contract);
  }
}
