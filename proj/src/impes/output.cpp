#include "impes/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "impes/error.hpp"

namespace impes {

VertexFields vertex_fields(const Simulator& sim) {
  const Grid& grid = sim.problem().grid;
  const SimulationState& st = sim.state();
  const int nv = grid.num_vertices();
  VertexFields f;
  f.x.resize(nv);
  f.y.resize(nv);
  f.s = st.saturation.values;
  f.p.assign(nv, 0.0);
  f.ux.assign(nv, 0.0);
  f.uy.assign(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    const Point x = grid.vertex(v);
    f.x[v] = x.x;
    f.y[v] = x.y;
  }
  if (!st.bases) return f;

  std::vector<int> count(nv, 0);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto verts = grid.element_vertices(e);
    const auto corners = grid.element_corners(e);
    for (int k = 0; k < 4; ++k) {
      const int v = verts[k];
      f.p[v] += pressure_at(grid, sim.geometry(), *st.bases, st.pressure, e, corners[k]).value;
      const Point u = st.flux.velocity(grid, e, corners[k]);
      f.ux[v] += u.x;
      f.uy[v] += u.y;
      ++count[v];
    }
  }
  for (int v = 0; v < nv; ++v) {
    f.p[v] /= count[v];
    f.ux[v] /= count[v];
    f.uy[v] /= count[v];
  }
  return f;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace

void write_vtk(const std::string& path, const Grid& grid, const VertexFields& f,
               const std::string& title) {
  std::ofstream out = open_for_write(path);
  const Rect& d = grid.domain();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << grid.nx() + 1 << ' ' << grid.ny() + 1 << " 1\n";
  out << "ORIGIN " << d.x0 << ' ' << d.y0 << " 0\n";
  out << "SPACING " << grid.hx() << ' ' << grid.hy() << " 1\n";
  out << "POINT_DATA " << grid.num_vertices() << '\n';
  char buf[32];
  auto scalars = [&](const char* name, auto value) {
    out << "SCALARS " << name << " float 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < grid.num_vertices(); ++v) {
      std::snprintf(buf, sizeof buf, "%.7g", static_cast<double>(value(v)));
      out << buf << '\n';
    }
  };
  scalars("S", [&](int v) { return f.s[v]; });
  scalars("p", [&](int v) { return f.p[v]; });
  scalars("umag", [&](int v) { return std::hypot(f.ux[v], f.uy[v]); });
  finish(out, path);
}

void write_fields_csv(const std::string& path, const VertexFields& f) {
  std::ofstream out = open_for_write(path);
  out << "x,y,S,p,ux,uy\n";
  char buf[160];
  for (std::size_t v = 0; v < f.s.size(); ++v) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", f.x[v], f.y[v], f.s[v],
                  f.p[v], f.ux[v], f.uy[v]);
    out << buf;
  }
  finish(out, path);
}

}  // namespace impes
