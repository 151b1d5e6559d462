#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "impes/fields.hpp"
#include "impes/fluid.hpp"
#include "impes/mesh.hpp"
#include "impes/velocity.hpp"

namespace impes {

/// M(P, j) = integral over the dual volume of P of the bilinear basis psi_j.
Eigen::SparseMatrix<double> assemble_dual_mass(const Grid& grid);

/// Per-vertex integrals of f over the dual volumes (2x2 Gauss per quarter cell).
std::vector<double> dual_integrals(const Grid& grid, const std::function<double(Point)>& f);

/// Normal wetting flux through one dual segment separating vertex i (owner,
/// normal pointing away from it) from vertex j, with one-point quadrature at
/// the segment midpoint m:
///   |gamma| f_w(S*) [u_h(m) + K(m) lambda_n(S_h(m)) p_c'(S_h(m)) grad S_h(m)] . n
/// where S* = S(i) if the bracket is >= 0 and S(j) otherwise.
struct SegmentFlux {
  double flux = 0.0;
  double normal_velocity = 0.0;
};

SegmentFlux upwind_flux(const Grid& grid, const FluxField& u, const VertexScalarField& s,
                        const FluidModel& fluid, int element, Point midpoint, Point normal,
                        double length, int vertex_i, int vertex_j, double permeability);

struct TransportData {
  std::vector<double> wetting_source;               // per vertex, integral of q_w over the dual volume
  std::function<double(Point)> dirichlet;           // boundary saturation; empty: no-flow boundary
  std::function<double(Point)> permeability;        // K by true interface side
};

struct TransportSettings {
  bool lumped_mass = false;
  double rel_tol = 1e-12;
  int max_iter = 2000;
  int workers = 1;
};

struct TransportReport {
  double s_min = 0.0;
  double s_max = 0.0;
  double courant = 0.0;       // max |v_n| dt / h over all segments
  int iterations = 0;
  double mass_before = 0.0;   // sum of M S over all vertices, times porosity
  double mass_after = 0.0;
  double net_source = 0.0;    // dt * integral of q_w (injection minus production)
};

/// Explicit dual-volume saturation update M S^{l+1} = b with Dirichlet rows
/// eliminated. Holds the mass matrix and its factorisation state across steps.
class SaturationStepper {
 public:
  SaturationStepper(const Grid& grid, const std::vector<bool>& dirichlet_vertices,
                    TransportSettings settings = {});
  ~SaturationStepper();
  SaturationStepper(SaturationStepper&&) noexcept;
  SaturationStepper& operator=(SaturationStepper&&) noexcept;

  VertexScalarField step(const VertexScalarField& s, const FluxField& u, const FluidModel& fluid,
                         const TransportData& data, double dt, TransportReport* report = nullptr);

  const Eigen::SparseMatrix<double>& mass() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Boundary vertices flagged true.
std::vector<bool> boundary_vertices(const Grid& grid);

}  // namespace impes
