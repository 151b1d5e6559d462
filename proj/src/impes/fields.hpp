#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "impes/mesh.hpp"

namespace impes {

enum class DofMarker : std::uint8_t { Free, Dirichlet };

/// One value per edge: the edge average of the global pressure.
struct EdgeScalarField {
  std::vector<double> values;
  std::vector<DofMarker> markers;
};

/// One value per vertex: nodal values of the bilinear saturation.
struct VertexScalarField {
  std::vector<double> values;
  std::vector<DofMarker> markers;

  static VertexScalarField constant(const Grid& grid, double value) {
    return {std::vector<double>(grid.num_vertices(), value),
            std::vector<DofMarker>(grid.num_vertices(), DofMarker::Free)};
  }
};

/// Bilinear interpolation of vertex values inside element e.
inline double interpolate(const Grid& grid, const std::vector<double>& nodal, int e, Point x) {
  const Rect r = grid.element_rect(e);
  const auto v = grid.element_vertices(e);
  const double s = (x.x - r.x0) / r.width();
  const double t = (x.y - r.y0) / r.height();
  return (1.0 - s) * (1.0 - t) * nodal[v[0]] + s * (1.0 - t) * nodal[v[1]] + s * t * nodal[v[2]] +
         (1.0 - s) * t * nodal[v[3]];
}

inline Point interpolate_gradient(const Grid& grid, const std::vector<double>& nodal, int e,
                                  Point x) {
  const Rect r = grid.element_rect(e);
  const auto v = grid.element_vertices(e);
  const double s = (x.x - r.x0) / r.width();
  const double t = (x.y - r.y0) / r.height();
  const double ds = (1.0 - t) * (nodal[v[1]] - nodal[v[0]]) + t * (nodal[v[2]] - nodal[v[3]]);
  const double dt = (1.0 - s) * (nodal[v[3]] - nodal[v[0]]) + s * (nodal[v[2]] - nodal[v[1]]);
  return {ds / r.width(), dt / r.height()};
}

}  // namespace impes
