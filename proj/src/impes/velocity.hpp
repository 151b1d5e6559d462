#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "impes/mesh.hpp"
#include "impes/pressure.hpp"

namespace impes {

/// Lowest-order Raviart-Thomas velocity stored as edge fluxes.
///
/// element_flux[e][k] is |e_k| (u . n) on local edge k of element e with n
/// outward to e. edge_flux[id] is the consolidated flux through edge id in
/// the global orientation (+y for horizontal, +x for vertical edges), taken
/// from the lower-numbered neighbour.
class FluxField {
 public:
  FluxField() = default;
  FluxField(const Grid& grid, std::vector<std::array<double, 4>> element_flux,
            std::vector<double> source_integrals, std::uint64_t token);

  const std::vector<std::array<double, 4>>& element_flux() const { return element_flux_; }
  const std::vector<double>& edge_flux() const { return edge_flux_; }
  std::uint64_t token() const { return token_; }

  /// RT0 velocity at x inside element e.
  Point velocity(const Grid& grid, int e, Point x) const;
  double divergence(const Grid& grid, int e) const;

  /// max |F_a + F_b| over interior edges, relative to the largest flux.
  double conservation_mismatch() const { return mismatch_; }
  /// max |sum_k F_k - integral of f_bar| over elements, relative to the
  /// largest flux or source integral.
  double balance_error() const { return balance_; }

 private:
  std::vector<std::array<double, 4>> element_flux_;
  std::vector<double> edge_flux_;
  std::uint64_t token_ = 0;
  double mismatch_ = 0.0;
  double balance_ = 0.0;
};

/// Local flux recovery |e_i|(u.n) = int f_bar phi_i - int beta grad p . grad phi_i.
/// Throws Error(Contract) if the pressure was not solved from this system.
FluxField recover_velocity(const Grid& grid, const PressureSystem& system,
                           const PressureSolution& pressure, int workers = 1);

}  // namespace impes
