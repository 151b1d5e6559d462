#include "patch.hpp"

#include <algorithm>
#include <cmath>

#include "impes/pressure.hpp"
#include "impes/velocity.hpp"
#include "oracles.hpp"

namespace oracle {

PatchResult run_patch(const PatchProblem& pb) {
  using namespace impes;
  const Grid grid(pb.n, pb.n, pb.domain);
  const InterfaceGeometry geo =
      pb.level_set ? classify_elements(grid, LevelSet{pb.level_set}) : uniform_geometry(grid);
  FluidModel fluid;
  const VertexScalarField s = VertexScalarField::constant(grid, 0.5);
  const CoefficientField coef(grid, geo, Permeability{pb.k_plus, pb.k_minus}, fluid, s);
  const double lambda = fluid.lambda(0.5);
  const BasisSet bases(grid, geo, coef);
  PressureData data;
  data.dirichlet = pb.pressure;
  const PressureSystem sys = assemble_pressure(grid, geo, bases, coef, data);
  SolverSettings settings;
  settings.kind = SolverKind::Cholesky;
  settings.rel_tol = 1e-14;
  const PressureSolution sol = PressureSolver(settings).solve(sys);
  const FluxField flux = recover_velocity(grid, sys, sol);

  const auto level = pb.level_set ? pb.level_set : [](Point) { return 1.0; };
  auto exact_average = [&](const EdgeInfo& info) {
    // p is linear on each side, so the midpoint rule is exact per piece.
    double lo = 0.0, hi = 1.0;
    const bool sa = level(info.a) >= 0.0;
    const bool split = sa != (level(info.b) >= 0.0);
    if (split) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((level(info.a + mid * (info.b - info.a)) >= 0.0) == sa ? lo : hi) = mid;
      }
    }
    const double c = split ? 0.5 * (lo + hi) : 1.0;
    double avg = c * pb.pressure(info.a + (0.5 * c) * (info.b - info.a));
    if (split) avg += (1.0 - c) * pb.pressure(info.a + (0.5 * (1.0 + c)) * (info.b - info.a));
    return avg;
  };

  PatchResult res;
  res.cut_elements = static_cast<int>(geo.cuts.size());
  double p_scale = 0.0, f_scale = 0.0;
  std::vector<double> dof_err(grid.num_edges()), flux_err(grid.num_edges());
  for (int id = 0; id < grid.num_edges(); ++id) {
    const EdgeInfo info = grid.edge(id);
    const double exact = exact_average(info);
    p_scale = std::max(p_scale, std::abs(exact));
    dof_err[id] = std::abs(sol.field.values[id] - exact);
    // Global orientation: +y across horizontal edges, +x across vertical ones.
    const Point a = info.orientation == EdgeOrientation::Horizontal ? info.b : info.a;
    const Point b = info.orientation == EdgeOrientation::Horizontal ? info.a : info.b;
    const double f = segment_flux(a, b, level, pb.gradient, lambda * pb.k_plus, lambda * pb.k_minus);
    f_scale = std::max(f_scale, std::abs(f));
    flux_err[id] = std::abs(flux.edge_flux()[id] - f);
  }
  res.dof_error = *std::max_element(dof_err.begin(), dof_err.end()) / p_scale;
  res.flux_error = *std::max_element(flux_err.begin(), flux_err.end()) / f_scale;

  double u_scale = 0.0, u_err = 0.0;
  for (int e = 0; e < grid.num_elements(); ++e) {
    if (geo.cut(e)) continue;
    const Rect r = grid.element_rect(e);
    for (double fx : {0.1, 0.5, 0.9}) {
      for (double fy : {0.2, 0.7}) {
        const Point x{r.x0 + fx * r.width(), r.y0 + fy * r.height()};
        const double beta = lambda * (level(x) >= 0.0 ? pb.k_plus : pb.k_minus);
        const Point u = -beta * pb.gradient(x);
        const Point uh = flux.velocity(grid, e, x);
        u_scale = std::max(u_scale, norm(u));
        u_err = std::max(u_err, norm(uh - u));
      }
    }
  }
  res.velocity_error = u_err / u_scale;
  return res;
}

}  // namespace oracle
