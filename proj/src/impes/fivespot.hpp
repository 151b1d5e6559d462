#pragma once

#include <vector>

#include "impes/simulation.hpp"

namespace impes {

inline constexpr double kSecondsPerDay = 86400.0;

/// Quarter five-spot waterflood on (0,300)^2 m around a low-permeability
/// disk. Wetting fluid is injected in the element holding `injector`; the
/// element holding `producer` withdraws the same total rate, with the
/// wetting share given by the local fractional flow. No flow elsewhere.
struct FiveSpotConfig {
  int n = 64;
  double inject_rate = 30.0;  // m^2/day (per unit depth)
  double dt_days = 0.0;       // <= 0: h^2 / 240 day
  double end_days = 375.0;
  double entry_pressure = 0.0;
  Point injector{7.5, 7.5};
  Point producer{292.5, 292.5};
};

/// Level set of the disk: negative inside.
double fivespot_level_set(Point x);

/// Initial saturation: 0.8 on [30,140] x [170.7,243.3], 0 elsewhere.
double fivespot_initial_saturation(Point x);

double fivespot_time_step_days(const FiveSpotConfig& config);

/// Problem in SI units (time in seconds).
Problem fivespot_problem(const FiveSpotConfig& config);

/// Smallest step count whose time reaches `days` (within roundoff).
int steps_to_reach(double days, double dt_days);

struct FrontProxy {
  double disk_mean = 0.0;     // mean S over the disk
  double annulus_mean = 0.0;  // mean S over the 25 m ring outside it
};

/// Dual-volume weighted means of the nodal saturation.
FrontProxy front_proxy(const Grid& grid, const VertexScalarField& s);

}  // namespace impes
