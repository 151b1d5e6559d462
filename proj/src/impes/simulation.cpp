#include "impes/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impes/error.hpp"
#include "impes/parallel.hpp"

namespace impes {

std::array<QuadPoint, kSourcePoints> source_points(const Grid& grid, int e) {
  const Rect r = grid.element_rect(e);
  const Point c = r.center();
  const std::array<Rect, 4> quarters{Rect{r.x0, r.y0, c.x, c.y}, Rect{c.x, r.y0, r.x1, c.y},
                                     Rect{c.x, c.y, r.x1, r.y1}, Rect{r.x0, c.y, c.x, r.y1}};
  std::array<QuadPoint, kSourcePoints> pts;
  for (int k = 0; k < 4; ++k) {
    const QuadratureRule rule = gauss_rectangle(quarters[k], 2);
    for (int i = 0; i < 4; ++i) pts[4 * k + i] = rule[i];
  }
  return pts;
}

double Problem::permeability_at(Point x) const {
  if (!level_set) return permeability.plus;
  return level_set(x) >= 0.0 ? permeability.plus : permeability.minus;
}

BasisEval pressure_at(const Grid& grid, const InterfaceGeometry& geo, const BasisSet& bases,
                      const EdgeScalarField& p, int e, Point x) {
  const ElementBasis& basis = bases[e];
  const auto edges = grid.element_edges(e);
  const Side side = geo.cut(e) != nullptr ? basis.side_of(x) : Side::Plus;
  BasisEval out;
  for (int k = 0; k < 4; ++k) {
    const BasisEval b = basis.eval(k, x, side);
    out.value += p.values[edges[k]] * b.value;
    out.gradient = out.gradient + p.values[edges[k]] * b.gradient;
  }
  return out;
}

struct Simulator::Impl {
  Problem problem;
  SimulationSettings settings;
  InterfaceGeometry geo;
  SimulationState state;
  RunStats stats;
  PressureSolver solver;
  SaturationStepper stepper;

  Impl(Problem p, SimulationSettings s)
      : problem(std::move(p)),
        settings(std::move(s)),
        geo(problem.level_set ? classify_elements(problem.grid,
                                                  LevelSet{problem.level_set,
                                                           problem.level_set_tolerance})
                              : uniform_geometry(problem.grid)),
        solver(settings.pressure),
        stepper(problem.grid,
                problem.saturation_dirichlet ? boundary_vertices(problem.grid)
                                             : std::vector<bool>(problem.grid.num_vertices(), false),
                transport_settings(settings)) {}

  static TransportSettings transport_settings(const SimulationSettings& s) {
    TransportSettings t = s.transport;
    t.workers = s.workers;
    return t;
  }
};

Simulator::Simulator(Problem problem, SimulationSettings settings) {
  problem.fluid.validate();
  if (!(problem.dt > 0.0) || problem.steps < 0) {
    throw Error(ErrorCode::InvalidArgument, "time step must be positive and step count nonnegative");
  }
  if (!(problem.permeability.plus > 0.0) || !(problem.permeability.minus > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "permeabilities must be positive");
  }
  if (!problem.initial_saturation) {
    throw Error(ErrorCode::InvalidArgument, "initial saturation missing");
  }
  if (settings.workers < 1) throw Error(ErrorCode::InvalidArgument, "worker count must be >= 1");
  impl_ = std::make_unique<Impl>(std::move(problem), std::move(settings));

  const Grid& grid = impl_->problem.grid;
  SimulationState& st = impl_->state;
  st.saturation = VertexScalarField::constant(grid, 0.0);
  for (int v = 0; v < grid.num_vertices(); ++v) {
    st.saturation.values[v] = impl_->problem.initial_saturation(grid.vertex(v));
  }
  const auto [lo, hi] = std::minmax_element(st.saturation.values.begin(), st.saturation.values.end());
  impl_->stats.s_min = *lo;
  impl_->stats.s_max = *hi;
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const Problem& Simulator::problem() const { return impl_->problem; }
const InterfaceGeometry& Simulator::geometry() const { return impl_->geo; }
const SimulationState& Simulator::state() const { return impl_->state; }
const RunStats& Simulator::stats() const { return impl_->stats; }

void Simulator::advance(int steps) {
  for (int i = 0; i < steps; ++i) step();
}

void Simulator::step() {
  Impl& m = *impl_;
  const Problem& pb = m.problem;
  const Grid& grid = pb.grid;
  SimulationState& st = m.state;
  const int workers = m.settings.workers;
  const int level = st.level + 1;
  const double t = level * pb.dt;

  try {
    const CoefficientField coef(grid, m.geo, pb.permeability, pb.fluid, st.saturation);
    auto bases = std::make_shared<const BasisSet>(grid, m.geo, coef, workers);

    std::vector<double> element_source(grid.num_elements(), 0.0);
    std::vector<double> wetting(grid.num_vertices(), 0.0);
    if (pb.source) {
      std::vector<std::array<double, 4>> quarter_wetting(grid.num_elements());
      parallel_for(grid.num_elements(), workers, [&](int e) {
        const auto pts = source_points(grid, e);
        double total = 0.0;
        quarter_wetting[e] = {};
        for (int q = 0; q < kSourcePoints; ++q) {
          const double s = interpolate(grid, st.saturation.values, e, pts[q].x);
          const SourceValue v = pb.source(e, q, pts[q].x, t, s);
          total += pts[q].w * v.total;
          quarter_wetting[e][q / 4] += pts[q].w * v.wetting;
        }
        element_source[e] = total;
      });
      for (int e = 0; e < grid.num_elements(); ++e) {
        const auto verts = grid.element_vertices(e);
        for (int k = 0; k < 4; ++k) wetting[verts[k]] += quarter_wetting[e][k];
      }
    }

    PressureData pdata;
    pdata.source_integrals = std::move(element_source);
    if (pb.pressure_dirichlet) {
      pdata.dirichlet = [&pb, t](Point x) { return pb.pressure_dirichlet(x, t); };
    }
    const PressureSystem system = assemble_pressure(grid, m.geo, *bases, coef, pdata, workers);
    const bool warm = st.pressure.values.size() == static_cast<std::size_t>(grid.num_edges());
    PressureSolution sol = m.solver.solve(system, warm ? &st.pressure : nullptr);
    FluxField flux = recover_velocity(grid, system, sol, workers);

    TransportData tdata;
    tdata.wetting_source = std::move(wetting);
    if (pb.saturation_dirichlet) {
      tdata.dirichlet = [&pb, t](Point x) { return pb.saturation_dirichlet(x, t); };
    }
    tdata.permeability = [&pb](Point x) { return pb.permeability_at(x); };

    StepLog log;
    VertexScalarField next = m.stepper.step(st.saturation, flux, pb.fluid, tdata, pb.dt, &log.transport);

    log.level = level;
    log.time = t;
    log.pressure_iterations = sol.report.iterations;
    log.pressure_residual = sol.report.relative_residual;
    log.flux_mismatch = flux.conservation_mismatch();
    log.balance_error = flux.balance_error();

    RunStats& rs = m.stats;
    rs.max_flux_mismatch = std::max(rs.max_flux_mismatch, log.flux_mismatch);
    rs.max_balance_error = std::max(rs.max_balance_error, log.balance_error);
    rs.s_min = std::min(rs.s_min, log.transport.s_min);
    rs.s_max = std::max(rs.s_max, log.transport.s_max);
    rs.max_courant = std::max(rs.max_courant, log.transport.courant);
    rs.pressure_iterations += sol.report.iterations;
    if (!pb.saturation_dirichlet) {
      const TransportReport& tr = log.transport;
      const double change = tr.mass_after - tr.mass_before;
      const double scale = tr.net_source != 0.0 ? std::abs(tr.net_source) : std::abs(tr.mass_before);
      if (scale > 0.0) {
        rs.max_mass_defect = std::max(rs.max_mass_defect, std::abs(change - tr.net_source) / scale);
      }
    }

    st.level = level;
    st.time = t;
    st.saturation = std::move(next);
    st.pressure = std::move(sol.field);
    st.flux = std::move(flux);
    st.bases = std::move(bases);
    if (m.settings.on_step) m.settings.on_step(log);
  } catch (const Error& err) {
    std::ostringstream msg;
    msg << "time level " << level << ": " << err.what();
    throw Error(err.code(), msg.str());
  }
}

}  // namespace impes
