#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "impes/fem.hpp"
#include "impes/fields.hpp"
#include "impes/fluid.hpp"
#include "impes/mesh.hpp"

namespace impes {

struct Permeability {
  double plus = 1.0;
  double minus = 1.0;

  double operator()(Side side) const { return side == Side::Plus ? plus : minus; }
};

/// beta(x) = lambda(S_h(x)) * K(side), with S_h the bilinear saturation.
class CoefficientField {
 public:
  CoefficientField(const Grid& grid, const InterfaceGeometry& geo, Permeability permeability,
                   const FluidModel& fluid, const VertexScalarField& saturation)
      : grid_(&grid), geo_(&geo), permeability_(permeability), fluid_(&fluid),
        saturation_(&saturation) {}

  double at(int element, Point x, Side side) const;

  /// (beta+, beta-) used to build the immersed basis: mobility frozen at G.
  std::pair<double, double> interface_betas(const ElementCut& cut) const;

  const Permeability& permeability() const { return permeability_; }

 private:
  const Grid* grid_;
  const InterfaceGeometry* geo_;
  Permeability permeability_;
  const FluidModel* fluid_;
  const VertexScalarField* saturation_;
};

/// Local bases for every element, built for one coefficient snapshot.
class BasisSet {
 public:
  BasisSet(const Grid& grid, const InterfaceGeometry& geo, const CoefficientField& coefficient,
           int workers = 1);

  const ElementBasis& operator[](int e) const { return bases_[e]; }
  std::size_t size() const { return bases_.size(); }
  std::uint64_t token() const { return token_; }

 private:
  std::vector<ElementBasis> bases_;
  std::uint64_t token_;
};

struct PressureData {
  std::vector<double> source_integrals;    // per element, integral of q_w + q_n; empty: no source
  std::function<double(Point)> dirichlet;  // empty: pure Neumann, one DOF pinned to 0
};

/// Per-element integrals of f with a 3x3 Gauss rule.
std::vector<double> element_integrals(const Grid& grid, const std::function<double(Point)>& f);

struct LocalSystem {
  Eigen::Matrix4d stiffness = Eigen::Matrix4d::Zero();
  Eigen::Vector4d load = Eigen::Vector4d::Zero();  // f_bar * integral of phi_i
  double source_integral = 0.0;                    // integral of f_bar over the element
};

/// Assembled primal system with Dirichlet DOFs eliminated symmetrically.
class PressureSystem {
 public:
  const std::vector<LocalSystem>& local() const { return local_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }
  /// Index into the reduced system, -1 for Dirichlet edges.
  const std::vector<int>& dof_of_edge() const { return dof_of_edge_; }
  const std::vector<double>& dirichlet_values() const { return dirichlet_values_; }
  double shift() const { return shift_; }
  bool pure_neumann() const { return pure_neumann_; }
  std::uint64_t token() const { return token_; }
  int num_free() const { return static_cast<int>(rhs_.size()); }

 private:
  friend PressureSystem assemble_pressure(const Grid&, const InterfaceGeometry&, const BasisSet&,
                                          const CoefficientField&, const PressureData&, int);

  std::vector<LocalSystem> local_;
  Eigen::SparseMatrix<double> matrix_;
  Eigen::VectorXd rhs_;
  std::vector<int> dof_of_edge_;
  std::vector<double> dirichlet_values_;
  double shift_ = 0.0;
  bool pure_neumann_ = false;
  std::uint64_t token_ = 0;
};

PressureSystem assemble_pressure(const Grid& grid, const InterfaceGeometry& geo,
                                 const BasisSet& bases, const CoefficientField& coefficient,
                                 const PressureData& data, int workers = 1);

enum class SolverKind { Pcg, Cholesky };

struct SolverSettings {
  SolverKind kind = SolverKind::Pcg;
  double rel_tol = 1e-10;
  int max_iter = 20000;
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

struct PressureSolution {
  EdgeScalarField field;
  /// field.values minus the system shift, without the rounding incurred by
  /// adding the shift back.
  std::vector<double> deviation;
  std::uint64_t token = 0;
  SolveReport report;
};

/// Solver for successive pressure systems sharing a sparsity pattern.
class PressureSolver {
 public:
  explicit PressureSolver(SolverSettings settings = {});
  ~PressureSolver();
  PressureSolver(PressureSolver&&) noexcept;
  PressureSolver& operator=(PressureSolver&&) noexcept;

  /// Throws Error(Solver) when the relative residual tolerance is not met.
  PressureSolution solve(const PressureSystem& system, const EdgeScalarField* guess = nullptr);

  const SolverSettings& settings() const { return settings_; }

 private:
  struct Cache;
  SolverSettings settings_;
  std::unique_ptr<Cache> cache_;
};

inline PressureSolution solve_pressure(const PressureSystem& system, SolverSettings settings = {}) {
  return PressureSolver(settings).solve(system);
}

/// Edge average of f over edge `id`, split at the interface cut if any.
double edge_average(const Grid& grid, const InterfaceGeometry& geo, int id,
                    const std::function<double(Point)>& f);

}  // namespace impes
