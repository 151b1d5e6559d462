#pragma once

#include <functional>

#include "impes/mesh.hpp"

namespace oracle {

/// Exact piecewise-linear pressure p with gradient g(side), flux-continuous
/// across a straight interface (or a single medium when level_set is empty).
struct PatchProblem {
  int n = 4;
  impes::Rect domain{0.0, 0.0, 1.0, 1.0};
  std::function<double(impes::Point)> level_set;  // empty: uniform medium
  double k_plus = 1.0;
  double k_minus = 1.0;
  std::function<double(impes::Point)> pressure;
  std::function<impes::Point(impes::Point)> gradient;
};

struct PatchResult {
  double dof_error = 0.0;       // max |p_h(edge) - edge average of p| / max |p|
  double flux_error = 0.0;      // max edge flux error / max |flux|
  double velocity_error = 0.0;  // max |u_h - u| at element samples / max |u|, uncut elements
  int cut_elements = 0;
};

/// Solves the pressure problem with exact Dirichlet data and no source and
/// compares against the exact solution.
PatchResult run_patch(const PatchProblem& problem);

}  // namespace oracle
