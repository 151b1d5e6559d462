#include "impes/pressure.hpp"

#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "impes/error.hpp"
#include "impes/parallel.hpp"

namespace impes {

namespace {

std::uint64_t next_token() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

}  // namespace

double CoefficientField::at(int element, Point x, Side side) const {
  const double s = interpolate(*grid_, saturation_->values, element, x);
  return fluid_->lambda(s) * permeability_(side);
}

std::pair<double, double> CoefficientField::interface_betas(const ElementCut& cut) const {
  const double s = interpolate(*grid_, saturation_->values, cut.element, cut.G);
  const double lambda = fluid_->lambda(s);
  return {lambda * permeability_.plus, lambda * permeability_.minus};
}

BasisSet::BasisSet(const Grid& grid, const InterfaceGeometry& geo,
                   const CoefficientField& coefficient, int workers)
    : token_(next_token()) {
  std::vector<std::optional<ElementBasis>> built(grid.num_elements());
  parallel_for(grid.num_elements(), workers, [&](int e) {
    const Rect rect = grid.element_rect(e);
    if (const ElementCut* cut = geo.cut(e)) {
      const auto [bp, bm] = coefficient.interface_betas(*cut);
      built[e].emplace(e, rect, *cut, bp, bm);
    } else {
      built[e].emplace(e, rect);
    }
  });
  bases_.reserve(built.size());
  for (auto& b : built) bases_.push_back(std::move(*b));
}

std::vector<double> element_integrals(const Grid& grid, const std::function<double(Point)>& f) {
  std::vector<double> out(grid.num_elements(), 0.0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    for (const QuadPoint& q : gauss_rectangle(grid.element_rect(e), 3)) out[e] += q.w * f(q.x);
  }
  return out;
}

double edge_average(const Grid& grid, const InterfaceGeometry& geo, int id,
                    const std::function<double(Point)>& f) {
  const EdgeInfo info = grid.edge(id);
  std::vector<std::pair<Point, Point>> parts{{info.a, info.b}};
  if (!geo.edge_cuts.empty() && geo.edge_cuts[id]) {
    const Point p = *geo.edge_cuts[id];
    parts = {{info.a, p}, {p, info.b}};
  }
  double integral = 0.0;
  for (const auto& [a, b] : parts) {
    if (norm(b - a) == 0.0) continue;
    for (const QuadPoint& q : gauss_segment(a, b, 3)) integral += q.w * f(q.x);
  }
  return integral / info.length;
}

PressureSystem assemble_pressure(const Grid& grid, const InterfaceGeometry& geo,
                                 const BasisSet& bases, const CoefficientField& coefficient,
                                 const PressureData& data, int workers) {
  if (bases.size() != static_cast<std::size_t>(grid.num_elements())) {
    throw Error(ErrorCode::Contract, "basis set does not match the grid");
  }
  if (!data.source_integrals.empty() &&
      data.source_integrals.size() != static_cast<std::size_t>(grid.num_elements())) {
    throw Error(ErrorCode::InvalidArgument, "one source integral per element expected");
  }
  PressureSystem sys;
  sys.token_ = bases.token();
  sys.local_.resize(grid.num_elements());

  parallel_for(grid.num_elements(), workers, [&](int e) {
    const ElementBasis& basis = bases[e];
    if (basis.element() != e || basis.is_cut() != (geo.cut(e) != nullptr)) {
      throw Error(ErrorCode::Contract, "missing immersed basis for a cut element");
    }
    LocalSystem& loc = sys.local_[e];
    Eigen::Vector4d phi_integral = Eigen::Vector4d::Zero();
    for (const SidedQuadPoint& q : element_quadrature(grid, geo, e)) {
      const double beta = coefficient.at(e, q.x, q.side);
      std::array<BasisEval, 4> ev;
      for (int i = 0; i < 4; ++i) ev[i] = basis.eval(i, q.x, q.side);
      for (int i = 0; i < 4; ++i) {
        phi_integral[i] += q.w * ev[i].value;
        for (int j = 0; j < 4; ++j) {
          loc.stiffness(i, j) += q.w * beta * dot(ev[i].gradient, ev[j].gradient);
        }
      }
    }
    // The shape functions sum to one, so the last row and column follow
    // from the others; completing them this way keeps every row sum zero
    // to roundoff, which the local flux balance relies on.
    const double area = grid.element_rect(e).area();
    phi_integral[3] = area - phi_integral[0] - phi_integral[1] - phi_integral[2];
    for (int i = 0; i < 3; ++i) {
      loc.stiffness(i, 3) = -(loc.stiffness(i, 0) + loc.stiffness(i, 1) + loc.stiffness(i, 2));
      loc.stiffness(3, i) = loc.stiffness(i, 3);
    }
    loc.stiffness(3, 3) = -(loc.stiffness(3, 0) + loc.stiffness(3, 1) + loc.stiffness(3, 2));
    const double source = data.source_integrals.empty() ? 0.0 : data.source_integrals[e];
    const double mean = source / area;
    loc.load = mean * phi_integral;
    loc.source_integral = source;
  });

  const int n_edges = grid.num_edges();
  sys.dof_of_edge_.assign(n_edges, -1);
  sys.dirichlet_values_.assign(n_edges, 0.0);
  std::vector<bool> is_dirichlet(n_edges, false);
  if (data.dirichlet) {
    double sum = 0.0;
    int count = 0;
    for (int id = 0; id < n_edges; ++id) {
      if (!grid.edge(id).boundary()) continue;
      is_dirichlet[id] = true;
      sys.dirichlet_values_[id] = edge_average(grid, geo, id, data.dirichlet);
      sum += sys.dirichlet_values_[id];
      ++count;
    }
    sys.shift_ = sum / count;
  } else {
    sys.pure_neumann_ = true;
    double total = 0.0;
    double magnitude = 0.0;
    for (const LocalSystem& loc : sys.local_) {
      total += loc.source_integral;
      magnitude += std::abs(loc.source_integral);
    }
    if (std::abs(total) > 1e-10 * std::max(magnitude, 1e-300)) {
      std::ostringstream msg;
      msg << "pure Neumann pressure problem with incompatible sources (net " << total << ")";
      throw Error(ErrorCode::InvalidArgument, msg.str());
    }
    is_dirichlet[0] = true;
  }

  int n_free = 0;
  for (int id = 0; id < n_edges; ++id) {
    if (!is_dirichlet[id]) sys.dof_of_edge_[id] = n_free++;
  }

  sys.rhs_ = Eigen::VectorXd::Zero(n_free);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(16 * static_cast<std::size_t>(grid.num_elements()));
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto edges = grid.element_edges(e);
    const LocalSystem& loc = sys.local_[e];
    for (int i = 0; i < 4; ++i) {
      const int di = sys.dof_of_edge_[edges[i]];
      if (di < 0) continue;
      sys.rhs_[di] += loc.load[i];
      for (int j = 0; j < 4; ++j) {
        const int dj = sys.dof_of_edge_[edges[j]];
        if (dj >= 0) {
          triplets.emplace_back(di, dj, loc.stiffness(i, j));
        } else {
          sys.rhs_[di] -= loc.stiffness(i, j) * (sys.dirichlet_values_[edges[j]] - sys.shift_);
        }
      }
    }
  }
  sys.matrix_.resize(n_free, n_free);
  sys.matrix_.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

struct PressureSolver::Cache {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::Index rows = -1;
  Eigen::Index nonzeros = -1;
};

PressureSolver::PressureSolver(SolverSettings settings)
    : settings_(settings), cache_(std::make_unique<Cache>()) {
  if (!(settings.rel_tol > 0.0) || settings.max_iter <= 0) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerance and iteration cap must be positive");
  }
}

PressureSolver::~PressureSolver() = default;
PressureSolver::PressureSolver(PressureSolver&&) noexcept = default;
PressureSolver& PressureSolver::operator=(PressureSolver&&) noexcept = default;

PressureSolution PressureSolver::solve(const PressureSystem& system, const EdgeScalarField* guess) {
  const auto& A = system.matrix();
  const auto& b = system.rhs();
  const auto& dof = system.dof_of_edge();
  const double b_norm = b.norm();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(system.num_free());
  if (guess != nullptr && guess->values.size() == dof.size()) {
    for (std::size_t id = 0; id < dof.size(); ++id) {
      if (dof[id] >= 0) x[dof[id]] = guess->values[id] - system.shift();
    }
  }

  SolveReport report;
  auto run_pcg = [&](const Eigen::VectorXd& start) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(settings_.rel_tol);
    cg.setMaxIterations(settings_.max_iter);
    cg.compute(A);
    x = cg.solveWithGuess(b, start);
    report.iterations += static_cast<int>(cg.iterations());
    report.relative_residual = cg.error();
    if (cg.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "pressure CG did not converge: relative residual " << cg.error() << " after "
          << cg.iterations() << " iterations";
      throw Error(ErrorCode::Solver, msg.str());
    }
  };

  if (b_norm == 0.0) {
    x.setZero();
  } else if (settings_.kind == SolverKind::Pcg) {
    run_pcg(x);
  } else {
    Cache& c = *cache_;
    if (c.rows != A.rows() || c.nonzeros != A.nonZeros()) {
      c.ldlt.analyzePattern(A);
      c.rows = A.rows();
      c.nonzeros = A.nonZeros();
    }
    c.ldlt.factorize(A);
    if (c.ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::Solver, "pressure Cholesky factorization failed");
    }
    x = c.ldlt.solve(b);
    double rel = (b - A * x).norm() / b_norm;
    // Iterative refinement down to roundoff, stopping once it stalls.
    for (int k = 0; k < 3 && rel > 1e-15; ++k) {
      const Eigen::VectorXd candidate = x + c.ldlt.solve(Eigen::VectorXd(b - A * x));
      const double next = (b - A * candidate).norm() / b_norm;
      if (!(next < 0.5 * rel)) break;
      x = candidate;
      rel = next;
      ++report.iterations;
    }
    report.relative_residual = rel;
    if (rel > settings_.rel_tol) run_pcg(x);
  }

  PressureSolution sol;
  sol.token = system.token();
  sol.report = report;
  sol.field.values.resize(dof.size());
  sol.field.markers.resize(dof.size());
  sol.deviation.resize(dof.size());
  for (std::size_t id = 0; id < dof.size(); ++id) {
    if (dof[id] >= 0) {
      sol.deviation[id] = x[dof[id]];
      sol.field.values[id] = x[dof[id]] + system.shift();
      sol.field.markers[id] = DofMarker::Free;
    } else {
      sol.deviation[id] = system.dirichlet_values()[id] - system.shift();
      sol.field.values[id] = system.dirichlet_values()[id];
      sol.field.markers[id] = DofMarker::Dirichlet;
    }
  }
  return sol;
}

}  // namespace impes
