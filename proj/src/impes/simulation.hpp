#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "impes/fields.hpp"
#include "impes/fluid.hpp"
#include "impes/mesh.hpp"
#include "impes/pressure.hpp"
#include "impes/quadrature.hpp"
#include "impes/transport.hpp"
#include "impes/velocity.hpp"

namespace impes {

/// Source quadrature: a 2x2 Gauss rule on each quarter of the element, so
/// the same points serve the element averages of the pressure source and
/// the dual-volume integrals of the wetting source. Point q lies in the
/// quarter touching local vertex q / 4.
inline constexpr int kSourcePoints = 16;
std::array<QuadPoint, kSourcePoints> source_points(const Grid& grid, int e);

struct SourceValue {
  double total = 0.0;    // q_w + q_n
  double wetting = 0.0;  // q_w
};

/// Source density at source point `point` of `element`; s is the bilinear
/// saturation of the previous level there.
using SourceFunction =
    std::function<SourceValue(int element, int point, Point x, double t, double s)>;

struct Problem {
  Grid grid{2, 2, Rect{0.0, 0.0, 1.0, 1.0}};
  std::function<double(Point)> level_set;  // empty: homogeneous medium (K = K+)
  double level_set_tolerance = 1e-9;
  Permeability permeability;
  FluidModel fluid;
  SourceFunction source;                                     // empty: no sources
  std::function<double(Point, double)> pressure_dirichlet;   // empty: no-flow, one DOF pinned
  std::function<double(Point, double)> saturation_dirichlet; // empty: no-flow
  std::function<double(Point)> initial_saturation;
  double dt = 1.0;
  int steps = 0;

  /// K at x by the sign of the level set (L >= 0 is the plus side).
  double permeability_at(Point x) const;
};

struct StepLog {
  int level = 0;
  double time = 0.0;
  int pressure_iterations = 0;
  double pressure_residual = 0.0;
  double flux_mismatch = 0.0;
  double balance_error = 0.0;
  TransportReport transport;
};

struct RunStats {
  double max_flux_mismatch = 0.0;
  double max_balance_error = 0.0;
  // |mass change - net source| relative to |net source| (or to the mass when
  // there is no source); tracked only without Dirichlet saturation data.
  double max_mass_defect = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  double max_courant = 0.0;
  long long pressure_iterations = 0;
};

struct SimulationSettings {
  SolverSettings pressure;
  TransportSettings transport;
  int workers = 1;
  std::function<void(const StepLog&)> on_step;
};

struct SimulationState {
  int level = 0;
  double time = 0.0;
  VertexScalarField saturation;
  EdgeScalarField pressure;                // empty before the first step
  FluxField flux;
  std::shared_ptr<const BasisSet> bases;   // bases behind `pressure` and `flux`
};

/// IMPES loop: pressure from S^l, velocity recovery, explicit saturation step.
class Simulator {
 public:
  Simulator(Problem problem, SimulationSettings settings = {});
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  const Problem& problem() const;
  const InterfaceGeometry& geometry() const;
  const SimulationState& state() const;
  const RunStats& stats() const;

  /// Errors carry the failing time level in their message.
  void step();
  void advance(int steps);
  void run() { advance(problem().steps - state().level); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Pressure and its gradient from the edge DOFs at x in element e.
BasisEval pressure_at(const Grid& grid, const InterfaceGeometry& geo, const BasisSet& bases,
                      const EdgeScalarField& p, int e, Point x);

}  // namespace impes
