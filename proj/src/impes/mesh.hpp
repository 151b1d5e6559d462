#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "impes/geometry.hpp"

namespace impes {

enum class EdgeOrientation { Horizontal, Vertical };

struct EdgeInfo {
  EdgeOrientation orientation;
  int i = 0;
  int j = 0;
  Point a, b;  // a < b along the edge direction
  double length = 0.0;
  std::array<int, 2> elements{-1, -1};  // below/left first, -1 on the boundary
  bool boundary() const { return elements[0] < 0 || elements[1] < 0; }
};

/// Uniform nx-by-ny rectangular grid.
///
/// Elements are numbered row-major (e = j*nx + i). Horizontal edges come
/// first (id = j*nx + i, j in [0,ny]), then vertical edges
/// (id = nx*(ny+1) + j*(nx+1) + i, i in [0,nx]). Vertices are numbered
/// row-major over (nx+1)-by-(ny+1). Local element edges follow the order
/// bottom, right, top, left and local vertices BL, BR, TR, TL, so local
/// edge k joins local vertices k and k+1 (mod 4).
class Grid {
 public:
  Grid(int nx, int ny, Rect domain);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  const Rect& domain() const { return domain_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double h() const { return std::max(hx_, hy_); }

  int num_elements() const { return nx_ * ny_; }
  int num_edges() const { return nx_ * (ny_ + 1) + ny_ * (nx_ + 1); }
  int num_vertices() const { return (nx_ + 1) * (ny_ + 1); }

  int element_id(int i, int j) const { return j * nx_ + i; }
  std::array<int, 2> element_ij(int e) const { return {e % nx_, e / nx_}; }
  int vertex_id(int i, int j) const { return j * (nx_ + 1) + i; }
  std::array<int, 2> vertex_ij(int v) const { return {v % (nx_ + 1), v / (nx_ + 1)}; }
  int horizontal_edge(int i, int j) const { return j * nx_ + i; }
  int vertical_edge(int i, int j) const { return nx_ * (ny_ + 1) + j * (nx_ + 1) + i; }

  Rect element_rect(int e) const;
  Point element_center(int e) const { return element_rect(e).center(); }
  std::array<int, 4> element_edges(int e) const;
  std::array<int, 4> element_vertices(int e) const;
  std::array<Point, 4> element_corners(int e) const;

  Point vertex(int v) const;
  bool is_boundary_vertex(int v) const;
  EdgeInfo edge(int id) const;

  /// Element containing p (closed cells, ties resolved toward lower index).
  int locate(Point p) const;

 private:
  int nx_;
  int ny_;
  Rect domain_;
  double hx_;
  double hy_;
};

struct LevelSet {
  std::function<double(Point)> eval;
  double tolerance = 1e-9;  // relative snapping tolerance (scaled by h)
};

enum class Side { Plus, Minus };
enum class ElementLabel { Plus, Minus, Cut };

/// Sub-geometry of an element crossed by the interface. The interface is
/// replaced by the chord EF inside the element.
struct ElementCut {
  int element = -1;
  Point E, F, G;
  Point normal;  // unit normal of EF, pointing from the minus to the plus side
  std::array<int, 2> cut_edges{-1, -1};  // local edge indices holding E and F
  std::vector<Point> plus_polygon;       // counter-clockwise
  std::vector<Point> minus_polygon;
  std::vector<Triangle> plus_triangles;
  std::vector<Triangle> minus_triangles;

  double signed_distance(Point p) const { return dot(p - G, normal); }
  Side side_of(Point p) const { return signed_distance(p) >= 0.0 ? Side::Plus : Side::Minus; }
  double plus_area() const;
  double minus_area() const;
};

class InterfaceGeometry {
 public:
  std::vector<ElementLabel> labels;        // per element
  std::vector<Side> vertex_sides;          // per vertex, after snapping
  std::vector<std::optional<Point>> edge_cuts;  // per edge
  std::vector<int> cut_index;              // per element, -1 if uncut
  std::vector<ElementCut> cuts;

  const ElementCut* cut(int e) const { return cut_index[e] < 0 ? nullptr : &cuts[cut_index[e]]; }
  /// Side used by the discretization at p in element e (chord-based on cut elements).
  Side side(int e, Point p) const;
};

/// Classifies elements against the level set; throws Error(Resolution) when
/// an element has more than two sign-change edges.
InterfaceGeometry classify_elements(const Grid& grid, const LevelSet& level_set);

/// Geometry for a grid without any interface (every element Plus).
InterfaceGeometry uniform_geometry(const Grid& grid);

struct DualSegment {
  Point a, b;  // endpoints (edge midpoint -> element center for interior segments)
  Point midpoint;
  Point normal;  // unit, outward from the owning dual volume
  double length = 0.0;
  int element = -1;
  int neighbor = -1;  // adjacent vertex across the segment, -1 for boundary faces
  bool boundary = false;
};

struct DualVolume {
  int vertex = -1;
  double area = 0.0;
  std::vector<int> elements;
  std::vector<DualSegment> segments;  // interior segments then boundary faces
};

std::vector<DualVolume> build_dual_volumes(const Grid& grid);

}  // namespace impes
