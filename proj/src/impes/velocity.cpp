#include "impes/velocity.hpp"

#include <algorithm>
#include <cmath>

#include "impes/error.hpp"
#include "impes/parallel.hpp"

namespace impes {

FluxField::FluxField(const Grid& grid, std::vector<std::array<double, 4>> element_flux,
                     std::vector<double> source_integrals, std::uint64_t token)
    : element_flux_(std::move(element_flux)), token_(token) {
  if (element_flux_.size() != static_cast<std::size_t>(grid.num_elements()) ||
      source_integrals.size() != element_flux_.size()) {
    throw Error(ErrorCode::InvalidArgument, "flux field does not match the grid");
  }
  double scale = 0.0;
  for (const auto& f : element_flux_) {
    for (double v : f) scale = std::max(scale, std::abs(v));
  }
  double source_scale = scale;
  for (double s : source_integrals) source_scale = std::max(source_scale, std::abs(s));

  edge_flux_.assign(grid.num_edges(), 0.0);
  double mismatch = 0.0;
  for (int id = 0; id < grid.num_edges(); ++id) {
    const EdgeInfo info = grid.edge(id);
    // Local index of this edge in the element below/left and above/right.
    const int low_k = info.orientation == EdgeOrientation::Horizontal ? 2 : 1;
    const int high_k = info.orientation == EdgeOrientation::Horizontal ? 0 : 3;
    const int low = info.elements[0];
    const int high = info.elements[1];
    if (low >= 0) {
      edge_flux_[id] = element_flux_[low][low_k];
      if (high >= 0) {
        mismatch = std::max(mismatch, std::abs(element_flux_[low][low_k] +
                                               element_flux_[high][high_k]));
      }
    } else {
      edge_flux_[id] = -element_flux_[high][high_k];
    }
  }
  mismatch_ = scale > 0.0 ? mismatch / scale : mismatch;

  double balance = 0.0;
  for (std::size_t e = 0; e < element_flux_.size(); ++e) {
    const auto& f = element_flux_[e];
    balance = std::max(balance, std::abs(f[0] + f[1] + f[2] + f[3] - source_integrals[e]));
  }
  balance_ = source_scale > 0.0 ? balance / source_scale : balance;
}

Point FluxField::velocity(const Grid& grid, int e, Point x) const {
  const Rect r = grid.element_rect(e);
  const auto& f = element_flux_[e];
  const double s = (x.x - r.x0) / r.width();
  const double t = (x.y - r.y0) / r.height();
  const double ux = (1.0 - s) * (-f[3] / r.height()) + s * (f[1] / r.height());
  const double uy = (1.0 - t) * (-f[0] / r.width()) + t * (f[2] / r.width());
  return {ux, uy};
}

double FluxField::divergence(const Grid& grid, int e) const {
  const auto& f = element_flux_[e];
  return (f[0] + f[1] + f[2] + f[3]) / grid.element_rect(e).area();
}

FluxField recover_velocity(const Grid& grid, const PressureSystem& system,
                           const PressureSolution& pressure, int workers) {
  if (pressure.token != system.token()) {
    throw Error(ErrorCode::Contract,
                "velocity recovery called with a pressure solved from a different system");
  }
  if (system.local().size() != static_cast<std::size_t>(grid.num_elements()) ||
      pressure.deviation.size() != static_cast<std::size_t>(grid.num_edges())) {
    throw Error(ErrorCode::Contract, "pressure data does not match the grid");
  }
  std::vector<std::array<double, 4>> fluxes(grid.num_elements());
  std::vector<double> sources(grid.num_elements());
  parallel_for(grid.num_elements(), workers, [&](int e) {
    const auto edges = grid.element_edges(e);
    Eigen::Vector4d p;
    for (int k = 0; k < 4; ++k) p[k] = pressure.deviation[edges[k]];
    const LocalSystem& loc = system.local()[e];
    const Eigen::Vector4d f = loc.load - loc.stiffness * p;
    for (int k = 0; k < 4; ++k) fluxes[e][k] = f[k];
    sources[e] = loc.source_integral;
  });
  return FluxField(grid, std::move(fluxes), std::move(sources), system.token());
}

}  // namespace impes
