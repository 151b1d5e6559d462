#include "impes/manufactured.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "impes/error.hpp"

namespace impes {

namespace {

FieldSample sample(const Jet& j) {
  return {j.v, {j.dx(), j.dy()}, j.laplacian(), j.dt()};
}

Jet spatial_profile(const ManufacturedCase::Profile& profile, Point x, Side side) {
  return profile(Jet::variable(x.x, 0), Jet::variable(x.y, 1), side);
}

// Spatial profiles at the source points of every element, so that each step
// only needs the time factors and the constitutive functions.
class CachedSources {
 public:
  CachedSources(const ManufacturedCase& c, const Grid& grid)
      : fluid_(c.fluid), offset_(c.pressure_offset), b_(c.pressure_time), a_(c.saturation_time) {
    points_.resize(static_cast<std::size_t>(grid.num_elements()) * kSourcePoints);
    for (int e = 0; e < grid.num_elements(); ++e) {
      const auto pts = source_points(grid, e);
      for (int q = 0; q < kSourcePoints; ++q) {
        const Side side = c.side(pts[q].x);
        Entry& en = points_[static_cast<std::size_t>(e) * kSourcePoints + q];
        en.permeability = c.permeability(side);
        en.p = sample(spatial_profile(c.pressure_profile, pts[q].x, side));
        en.s = sample(spatial_profile(c.saturation_profile, pts[q].x, side));
      }
    }
  }

  SourceValue operator()(int e, int q, double t) const {
    const Entry& en = points_[static_cast<std::size_t>(e) * kSourcePoints + q];
    const double b = b_(t);
    const double a = a_(t);
    FieldSample p{offset_ + b * en.p.value, b * en.p.gradient, b * en.p.laplacian, 0.0};
    FieldSample s{a * en.s.value, a * en.s.gradient, a * en.s.laplacian, a_.c1 * en.s.value};
    return manufactured_sources(fluid_, en.permeability, p, s);
  }

 private:
  struct Entry {
    double permeability = 0.0;
    FieldSample p;
    FieldSample s;
  };
  FluidModel fluid_;
  double offset_;
  LinearInTime b_;
  LinearInTime a_;
  std::vector<Entry> points_;
};

ManufacturedCase base_case(const std::string& name) {
  ManufacturedCase c;
  c.name = name;
  const double half_pi = std::numbers::pi / 2.0;
  c.domain = {0.0, 0.0, half_pi, half_pi};
  c.pressure_offset = 100.0;
  c.pressure_time = {2.0, -1.0};
  return c;
}

ManufacturedCase example_planar_band() {
  ManufacturedCase c = base_case("ex1");
  c.permeability = {1.0, 0.001};
  const double kp = c.permeability.plus;
  const double km = c.permeability.minus;
  c.level_set = [](Point p) {
    const double l = p.x + p.y;
    return (l - 1.0) * (l - 3.0);
  };
  c.pressure_profile = [kp, km](const Jet& x, const Jet& y, Side side) -> Jet {
    const Jet l = x + y;
    if (side == Side::Minus) {
      const Jet m = l - 1.0;
      return -1.0 * m * (m * m * (1.0 / 3.0) - m + 1.0) * kp;
    }
    if (l.v < 2.0) return (l - 1.0) * (l - 2.0) * km;
    return -1.0 * ((l - 3.0) * (l - 2.0) * km + (2.0 / 3.0) * kp);
  };
  c.saturation_profile = [](const Jet& x, const Jet& y, Side) -> Jet {
    const Jet l = x + y;
    return 1.0 - l * (1.0 / 8.0) - l * l * (1.0 / 20.0);
  };
  c.saturation_time = {0.5, 0.5};
  return c;
}

ManufacturedCase example_circle() {
  ManufacturedCase c = base_case("ex2");
  c.permeability = {1.0, 0.001};
  const double kp = c.permeability.plus;
  const double km = c.permeability.minus;
  c.level_set = [](Point p) {
    return (p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5) - 1.0 / 16.0;
  };
  c.pressure_profile = [kp, km](const Jet& x, const Jet& y, Side side) -> Jet {
    const Jet L = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) - 1.0 / 16.0;
    if (side == Side::Plus) return -10.0 * L * (x - 1.0) * km;
    return 10.0 * (1.0 - exp(L * (x - 1.0))) * kp;
  };
  c.saturation_profile = [](const Jet& x, const Jet&, Side) -> Jet { return cos(x); };
  c.saturation_time = {0.2, 0.5};
  return c;
}

ManufacturedCase example_capillary(const std::string& name, double kp, double km) {
  ManufacturedCase c = base_case(name);
  c.permeability = {kp, km};
  c.fluid.entry_pressure = 1.0;
  c.level_set = [](Point p) { return 2.0 - p.x - p.y; };
  c.pressure_profile = [kp, km](const Jet& x, const Jet& y, Side side) -> Jet {
    const Jet l = x + y;
    const Jet L = 2.0 - l;
    return -10.0 * L * cos(l) * (side == Side::Plus ? km : kp);
  };
  c.saturation_profile = [kp, km](const Jet& x, const Jet& y, Side side) -> Jet {
    const Jet l = x + y;
    const Jet g = l + 0.25 * (l - 2.0) * (l - 2.0);
    if (side == Side::Plus) return 1.0 - 4.0 * g * km;
    return 1.0 + 8.0 * kp - 8.0 * km - 4.0 * g * kp;
  };
  c.saturation_time = {1.0, -0.5};
  return c;
}

}  // namespace

SourceValue manufactured_sources(const FluidModel& fluid, double permeability,
                                 const FieldSample& p, const FieldSample& s) {
  const Dual2 sd = Dual2::variable(s.value, 0);
  const Dual2 lam = fluid.lambda(sd);
  const Dual2 fw = fluid.frac_w(sd);
  const Dual2 g = fluid.lambda_n(sd) * fw;
  const Dual2 pc = fluid.pc(sd);

  const double k = permeability;
  const double gs_gp = dot(s.gradient, p.gradient);
  const double gs2 = dot(s.gradient, s.gradient);
  SourceValue out;
  out.total = -k * (lam.g[0] * gs_gp + lam.v * p.laplacian);
  const Point u = (-lam.v * k) * p.gradient;
  const double pc1 = pc.g[0];
  const double lap_pc = pc.H[0][0] * gs2 + pc1 * s.laplacian;
  out.wetting = fluid.porosity * s.dt + fw.g[0] * dot(s.gradient, u) + fw.v * out.total +
                k * (g.g[0] * pc1 * gs2 + g.v * lap_pc);
  return out;
}

Jet ManufacturedCase::pressure(Point x, double t, Side side) const {
  return pressure_offset + spatial_profile(pressure_profile, x, side) * pressure_time.jet(t);
}

Jet ManufacturedCase::saturation(Point x, double t, Side side) const {
  return spatial_profile(saturation_profile, x, side) * saturation_time.jet(t);
}

Point ManufacturedCase::velocity(Point x, double t) const {
  const Side sd = side(x);
  const Jet p = pressure(x, t, sd);
  const double s = saturation(x, t, sd).v;
  return (-fluid.lambda(s) * permeability(sd)) * Point{p.dx(), p.dy()};
}

SourceValue ManufacturedCase::sources(Point x, double t) const {
  const Side sd = side(x);
  return manufactured_sources(fluid, permeability(sd), sample(pressure(x, t, sd)),
                              sample(saturation(x, t, sd)));
}

Problem ManufacturedCase::problem(int n, double dt) const {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "mesh size must be at least 2");
  if (dt <= 0.0) dt = default_time_step(n);
  const double steps = std::round(final_time / dt);
  if (steps < 1.0 || std::abs(steps * dt - final_time) > 1e-12 * final_time) {
    throw Error(ErrorCode::InvalidArgument, "final time is not an integer multiple of the time step");
  }

  Problem pb;
  pb.grid = Grid(n, n, domain);
  pb.level_set = level_set;
  pb.permeability = permeability;
  pb.fluid = fluid;
  pb.dt = dt;
  pb.steps = static_cast<int>(steps);

  auto cache = std::make_shared<const CachedSources>(*this, pb.grid);
  pb.source = [cache](int e, int q, Point, double t, double) { return (*cache)(e, q, t); };
  const ManufacturedCase self = *this;
  pb.pressure_dirichlet = [self](Point x, double t) { return self.pressure(x, t).v; };
  pb.saturation_dirichlet = [self](Point x, double t) { return self.saturation(x, t).v; };
  pb.initial_saturation = [self](Point x) { return self.saturation(x, 0.0).v; };
  return pb;
}

ManufacturedCase make_case(const std::string& id) {
  if (id == "ex1") return example_planar_band();
  if (id == "ex2") return example_circle();
  if (id == "ex3a") return example_capillary("ex3a", 0.02, 0.008);
  if (id == "ex3b") return example_capillary("ex3b", 0.1, 0.001);
  throw Error(ErrorCode::InvalidArgument, "unknown case '" + id + "' (expected ex1, ex2, ex3a, ex3b)");
}

std::vector<std::string> case_ids() { return {"ex1", "ex2", "ex3a", "ex3b"}; }

}  // namespace impes
