#pragma once

#include <string>
#include <vector>

#include "impes/simulation.hpp"

namespace impes {

/// Nodal values for plotting: S as stored, p and u averaged over the
/// elements sharing each vertex (zero before the first step).
struct VertexFields {
  std::vector<double> x, y, s, p, ux, uy;
};

VertexFields vertex_fields(const Simulator& sim);

/// Legacy ASCII VTK structured points with POINT_DATA S, p and umag.
/// Throws Error(Io) on write failure.
void write_vtk(const std::string& path, const Grid& grid, const VertexFields& f,
               const std::string& title);

/// CSV with columns x,y,S,p,ux,uy, one row per vertex.
void write_fields_csv(const std::string& path, const VertexFields& f);

}  // namespace impes
