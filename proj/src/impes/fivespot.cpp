#include "impes/fivespot.hpp"

#include <cmath>

#include "impes/error.hpp"

namespace impes {

double fivespot_level_set(Point x) {
  return std::hypot(x.x - 85.0, x.y - 185.0) - 50.0;
}

double fivespot_initial_saturation(Point x) {
  const bool inside = x.x >= 30.0 && x.x <= 140.0 && x.y >= 170.7 && x.y <= 243.3;
  return inside ? 0.8 : 0.0;
}

double fivespot_time_step_days(const FiveSpotConfig& config) {
  if (config.dt_days > 0.0) return config.dt_days;
  const double h = 300.0 / config.n;
  return h * h / 240.0;
}

int steps_to_reach(double days, double dt_days) {
  return static_cast<int>(std::ceil(days / dt_days - 1e-9));
}

Problem fivespot_problem(const FiveSpotConfig& config) {
  if (config.n < 2) throw Error(ErrorCode::InvalidArgument, "mesh size must be at least 2");
  if (!(config.inject_rate >= 0.0) || !(config.end_days > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "injection rate must be >= 0 and end time > 0");
  }
  Problem pb;
  pb.grid = Grid(config.n, config.n, Rect{0.0, 0.0, 300.0, 300.0});
  pb.level_set = fivespot_level_set;
  pb.permeability = {1e-10, 1e-14};
  pb.fluid.mu_w = 0.001;
  pb.fluid.mu_n = 0.02;
  pb.fluid.porosity = 0.2;
  pb.fluid.entry_pressure = config.entry_pressure;
  pb.fluid.validate();

  const int inj = pb.grid.locate(config.injector);
  const int prod = pb.grid.locate(config.producer);
  if (inj == prod) throw Error(ErrorCode::InvalidArgument, "injector and producer share an element");
  const double area = pb.grid.element_rect(inj).area();
  const double density = config.inject_rate / kSecondsPerDay / area;  // 1/s
  const FluidModel fluid = pb.fluid;
  pb.source = [inj, prod, density, fluid](int e, int, Point, double, double s) {
    SourceValue v;
    if (e == inj) {
      v.total = density;
      v.wetting = density;
    } else if (e == prod) {
      v.total = -density;
      v.wetting = -density * fluid.frac_w(s);
    }
    return v;
  };
  pb.initial_saturation = fivespot_initial_saturation;
  const double dt_days = fivespot_time_step_days(config);
  pb.dt = dt_days * kSecondsPerDay;
  pb.steps = steps_to_reach(config.end_days, dt_days);
  return pb;
}

FrontProxy front_proxy(const Grid& grid, const VertexScalarField& s) {
  double disk = 0.0, disk_area = 0.0, ring = 0.0, ring_area = 0.0;
  for (int v = 0; v < grid.num_vertices(); ++v) {
    const auto [i, j] = grid.vertex_ij(v);
    const double wx = (i == 0 || i == grid.nx()) ? 0.5 : 1.0;
    const double wy = (j == 0 || j == grid.ny()) ? 0.5 : 1.0;
    const double area = wx * wy * grid.hx() * grid.hy();
    const double l = fivespot_level_set(grid.vertex(v));
    if (l < 0.0) {
      disk += area * s.values[v];
      disk_area += area;
    } else if (l < 25.0) {
      ring += area * s.values[v];
      ring_area += area;
    }
  }
  return {disk_area > 0.0 ? disk / disk_area : 0.0, ring_area > 0.0 ? ring / ring_area : 0.0};
}

}  // namespace impes
