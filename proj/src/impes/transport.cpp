#include "impes/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "impes/error.hpp"
#include "impes/parallel.hpp"
#include "impes/quadrature.hpp"

namespace impes {

namespace {

// Quarter of element e adjacent to its local vertex k.
Rect quarter(const Rect& r, int k) {
  const Point c = r.center();
  switch (k) {
    case 0: return {r.x0, r.y0, c.x, c.y};
    case 1: return {c.x, r.y0, r.x1, c.y};
    case 2: return {c.x, c.y, r.x1, r.y1};
    default: return {r.x0, c.y, c.x, r.y1};
  }
}

std::array<double, 4> bilinear_weights(const Rect& r, Point x) {
  const double s = (x.x - r.x0) / r.width();
  const double t = (x.y - r.y0) / r.height();
  return {(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t};
}

}  // namespace

Eigen::SparseMatrix<double> assemble_dual_mass(const Grid& grid) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(16 * static_cast<std::size_t>(grid.num_elements()));
  for (int e = 0; e < grid.num_elements(); ++e) {
    const Rect r = grid.element_rect(e);
    const auto verts = grid.element_vertices(e);
    for (int k = 0; k < 4; ++k) {
      std::array<double, 4> row{};
      for (const QuadPoint& q : gauss_rectangle(quarter(r, k), 2)) {
        const auto w = bilinear_weights(r, q.x);
        for (int j = 0; j < 4; ++j) row[j] += q.w * w[j];
      }
      for (int j = 0; j < 4; ++j) triplets.emplace_back(verts[k], verts[j], row[j]);
    }
  }
  Eigen::SparseMatrix<double> m(grid.num_vertices(), grid.num_vertices());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

std::vector<double> dual_integrals(const Grid& grid, const std::function<double(Point)>& f) {
  std::vector<double> out(grid.num_vertices(), 0.0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const Rect r = grid.element_rect(e);
    const auto verts = grid.element_vertices(e);
    for (int k = 0; k < 4; ++k) {
      for (const QuadPoint& q : gauss_rectangle(quarter(r, k), 2)) out[verts[k]] += q.w * f(q.x);
    }
  }
  return out;
}

std::vector<bool> boundary_vertices(const Grid& grid) {
  std::vector<bool> out(grid.num_vertices());
  for (int v = 0; v < grid.num_vertices(); ++v) out[v] = grid.is_boundary_vertex(v);
  return out;
}

SegmentFlux upwind_flux(const Grid& grid, const FluxField& u, const VertexScalarField& s,
                        const FluidModel& fluid, int element, Point midpoint, Point normal,
                        double length, int vertex_i, int vertex_j, double permeability) {
  Point v = u.velocity(grid, element, midpoint);
  if (fluid.has_capillarity()) {
    const double sm = interpolate(grid, s.values, element, midpoint);
    const Point grad = interpolate_gradient(grid, s.values, element, midpoint);
    const double c = permeability * fluid.lambda_n(sm) * fluid.dpc_ds(sm);
    v = v + c * grad;
  }
  SegmentFlux out;
  out.normal_velocity = dot(v, normal);
  const double upwind = out.normal_velocity >= 0.0 ? s.values[vertex_i] : s.values[vertex_j];
  out.flux = length * fluid.frac_w(upwind) * out.normal_velocity;
  return out;
}

struct SaturationStepper::Impl {
  const Grid* grid = nullptr;
  TransportSettings settings;
  std::vector<bool> dirichlet;
  Eigen::SparseMatrix<double> mass;        // full, consistent
  Eigen::VectorXd lumped;                  // row sums
  std::vector<int> free_index;             // vertex -> reduced index or -1
  std::vector<int> free_vertices;
  Eigen::SparseMatrix<double> reduced;     // free-free block
  Eigen::SparseMatrix<double> coupling;    // free-Dirichlet block, columns by vertex id
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

SaturationStepper::SaturationStepper(const Grid& grid, const std::vector<bool>& dirichlet_vertices,
                                     TransportSettings settings)
    : impl_(std::make_unique<Impl>()) {
  if (dirichlet_vertices.size() != static_cast<std::size_t>(grid.num_vertices())) {
    throw Error(ErrorCode::InvalidArgument, "one Dirichlet flag per vertex expected");
  }
  if (!(settings.rel_tol > 0.0) || settings.max_iter <= 0) {
    throw Error(ErrorCode::InvalidArgument, "transport solver tolerance must be positive");
  }
  Impl& m = *impl_;
  m.grid = &grid;
  m.settings = settings;
  m.dirichlet = dirichlet_vertices;
  m.mass = assemble_dual_mass(grid);
  m.lumped = m.mass * Eigen::VectorXd::Ones(grid.num_vertices());

  m.free_index.assign(grid.num_vertices(), -1);
  for (int v = 0; v < grid.num_vertices(); ++v) {
    if (!m.dirichlet[v]) {
      m.free_index[v] = static_cast<int>(m.free_vertices.size());
      m.free_vertices.push_back(v);
    }
  }
  const int nf = static_cast<int>(m.free_vertices.size());
  std::vector<Eigen::Triplet<double>> ff;
  std::vector<Eigen::Triplet<double>> fd;
  for (int col = 0; col < m.mass.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m.mass, col); it; ++it) {
      const int ri = m.free_index[it.row()];
      if (ri < 0) continue;
      const int ci = m.free_index[it.col()];
      if (ci >= 0) {
        ff.emplace_back(ri, ci, it.value());
      } else {
        fd.emplace_back(ri, static_cast<int>(it.col()), it.value());
      }
    }
  }
  m.reduced.resize(nf, nf);
  m.reduced.setFromTriplets(ff.begin(), ff.end());
  m.coupling.resize(nf, grid.num_vertices());
  m.coupling.setFromTriplets(fd.begin(), fd.end());
  m.cg.setTolerance(settings.rel_tol);
  m.cg.setMaxIterations(settings.max_iter);
  if (nf > 0) m.cg.compute(m.reduced);
}

SaturationStepper::~SaturationStepper() = default;
SaturationStepper::SaturationStepper(SaturationStepper&&) noexcept = default;
SaturationStepper& SaturationStepper::operator=(SaturationStepper&&) noexcept = default;

const Eigen::SparseMatrix<double>& SaturationStepper::mass() const { return impl_->mass; }

VertexScalarField SaturationStepper::step(const VertexScalarField& s, const FluxField& u,
                                          const FluidModel& fluid, const TransportData& data,
                                          double dt, TransportReport* report) {
  Impl& m = *impl_;
  const Grid& grid = *m.grid;
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  if (s.values.size() != static_cast<std::size_t>(grid.num_vertices()) ||
      u.element_flux().size() != static_cast<std::size_t>(grid.num_elements())) {
    throw Error(ErrorCode::Contract, "saturation step inputs do not match the grid");
  }
  if (!data.wetting_source.empty() &&
      data.wetting_source.size() != static_cast<std::size_t>(grid.num_vertices())) {
    throw Error(ErrorCode::InvalidArgument, "one wetting source integral per vertex expected");
  }
  const bool any_dirichlet = std::find(m.dirichlet.begin(), m.dirichlet.end(), true) != m.dirichlet.end();
  if (any_dirichlet && !data.dirichlet) {
    throw Error(ErrorCode::InvalidArgument, "Dirichlet saturation data missing");
  }

  const Eigen::Map<const Eigen::VectorXd> s_old(s.values.data(), grid.num_vertices());
  Eigen::VectorXd b = m.settings.lumped_mass ? Eigen::VectorXd(m.lumped.cwiseProduct(s_old))
                                             : Eigen::VectorXd(m.mass * s_old);
  const double scale = dt / fluid.porosity;
  double injected = 0.0;
  if (!data.wetting_source.empty()) {
    for (int v = 0; v < grid.num_vertices(); ++v) {
      b[v] += scale * data.wetting_source[v];
      injected += dt * data.wetting_source[v];
    }
  }

  // Segment k of an element joins local vertices k and k+1.
  std::vector<std::array<SegmentFlux, 4>> seg(grid.num_elements());
  parallel_for(grid.num_elements(), m.settings.workers, [&](int e) {
    const Rect r = grid.element_rect(e);
    const auto verts = grid.element_vertices(e);
    const auto corners = grid.element_corners(e);
    const Point c = r.center();
    for (int k = 0; k < 4; ++k) {
      const int k1 = (k + 1) % 4;
      const Point a = midpoint(corners[k], corners[k1]);
      const Point mid = midpoint(a, c);
      const Point dir = corners[k1] - corners[k];
      const Point n = (1.0 / norm(dir)) * dir;
      const double kval = data.permeability ? data.permeability(mid) : 1.0;
      seg[e][k] = upwind_flux(grid, u, s, fluid, e, mid, n, norm(c - a), verts[k], verts[k1], kval);
    }
  });
  double max_vn = 0.0;
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto verts = grid.element_vertices(e);
    for (int k = 0; k < 4; ++k) {
      const double f = scale * seg[e][k].flux;
      b[verts[k]] -= f;
      b[verts[(k + 1) % 4]] += f;
      max_vn = std::max(max_vn, std::abs(seg[e][k].normal_velocity));
    }
  }

  VertexScalarField out;
  out.values.resize(grid.num_vertices());
  out.markers.resize(grid.num_vertices());
  Eigen::VectorXd s_dir = Eigen::VectorXd::Zero(grid.num_vertices());
  for (int v = 0; v < grid.num_vertices(); ++v) {
    if (m.dirichlet[v]) {
      s_dir[v] = data.dirichlet(grid.vertex(v));
      out.values[v] = s_dir[v];
      out.markers[v] = DofMarker::Dirichlet;
    } else {
      out.markers[v] = DofMarker::Free;
    }
  }

  const int nf = static_cast<int>(m.free_vertices.size());
  Eigen::VectorXd rhs(nf);
  Eigen::VectorXd guess(nf);
  for (int i = 0; i < nf; ++i) {
    rhs[i] = b[m.free_vertices[i]];
    guess[i] = s.values[m.free_vertices[i]];
  }
  int iterations = 0;
  Eigen::VectorXd x(nf);
  if (m.settings.lumped_mass) {
    for (int i = 0; i < nf; ++i) x[i] = rhs[i] / m.lumped[m.free_vertices[i]];
  } else if (nf > 0) {
    rhs -= m.coupling * s_dir;
    x = m.cg.solveWithGuess(rhs, guess);
    iterations = static_cast<int>(m.cg.iterations());
    if (m.cg.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "dual mass solve did not converge: relative residual " << m.cg.error();
      throw Error(ErrorCode::Solver, msg.str());
    }
  }
  for (int i = 0; i < nf; ++i) out.values[m.free_vertices[i]] = x[i];

  if (report != nullptr) {
    const Eigen::Map<const Eigen::VectorXd> s_new(out.values.data(), grid.num_vertices());
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    report->s_min = *lo;
    report->s_max = *hi;
    report->courant = max_vn * dt / grid.h();
    report->iterations = iterations;
    if (m.settings.lumped_mass) {
      report->mass_before = fluid.porosity * m.lumped.dot(s_old);
      report->mass_after = fluid.porosity * m.lumped.dot(s_new);
    } else {
      report->mass_before = fluid.porosity * (m.mass * s_old).sum();
      report->mass_after = fluid.porosity * (m.mass * s_new).sum();
    }
    report->net_source = injected;
  }
  return out;
}

}  // namespace impes
