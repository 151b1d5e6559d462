#pragma once

#include <functional>
#include <string>
#include <vector>

#include "impes/fluid.hpp"
#include "impes/jet.hpp"
#include "impes/mesh.hpp"
#include "impes/pressure.hpp"
#include "impes/simulation.hpp"

namespace impes {

/// c0 + c1 t
struct LinearInTime {
  double c0 = 1.0;
  double c1 = 0.0;

  double operator()(double t) const { return c0 + c1 * t; }
  Jet jet(double t) const {
    Jet j(c0 + c1 * t);
    j.g[2] = c1;
    return j;
  }
};

/// Value, gradient, Laplacian and time derivative of a field at one point.
struct FieldSample {
  double value = 0.0;
  Point gradient;
  double laplacian = 0.0;
  double dt = 0.0;
};

/// Sources making (p, S) an exact solution of the global-pressure system:
///   q_w + q_n = -div(lambda(S) K grad p)
///   q_w       = phi dS/dt + div(f_w u) + div(K lambda_n f_w grad p_c(S)),  u = -lambda K grad p
SourceValue manufactured_sources(const FluidModel& fluid, double permeability,
                                 const FieldSample& p, const FieldSample& s);

/// Closed-form two-phase solution with a material interface. Both exact
/// fields are a spatial profile times a linear time factor:
///   p = offset + P(x, y) b(t),  S = Sigma(x, y) a(t),
/// with the profile chosen per side of the level set (L >= 0: plus side).
struct ManufacturedCase {
  using Profile = std::function<Jet(const Jet& x, const Jet& y, Side side)>;

  std::string name;
  Rect domain{0.0, 0.0, 1.0, 1.0};
  Permeability permeability;
  FluidModel fluid;
  double final_time = 1.0;
  std::function<double(Point)> level_set;
  Profile pressure_profile;
  double pressure_offset = 0.0;
  LinearInTime pressure_time;
  Profile saturation_profile;
  LinearInTime saturation_time;

  Side side(Point x) const { return level_set(x) >= 0.0 ? Side::Plus : Side::Minus; }
  double permeability_at(Point x) const { return permeability(side(x)); }

  /// Jets in (x, y, t).
  Jet pressure(Point x, double t, Side side) const;
  Jet saturation(Point x, double t, Side side) const;
  Jet pressure(Point x, double t) const { return pressure(x, t, side(x)); }
  Jet saturation(Point x, double t) const { return saturation(x, t, side(x)); }

  /// Total velocity -lambda(S) K grad p.
  Point velocity(Point x, double t) const;
  SourceValue sources(Point x, double t) const;

  /// Default time step 16 / n^2.
  static double default_time_step(int n) { return 16.0 / (static_cast<double>(n) * n); }

  /// Simulation setup on an n-by-n grid with exact Dirichlet data for p and
  /// S on the whole boundary. dt <= 0 selects the default step; the final
  /// time must be an integer multiple of dt.
  Problem problem(int n, double dt = 0.0) const;
};

/// ex1, ex2, ex3a, ex3b; throws Error(InvalidArgument) for anything else.
ManufacturedCase make_case(const std::string& id);
std::vector<std::string> case_ids();

}  // namespace impes
