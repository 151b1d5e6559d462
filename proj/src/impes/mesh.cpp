#include "impes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "impes/error.hpp"

namespace impes {

Grid::Grid(int nx, int ny, Rect domain) : nx_(nx), ny_(ny), domain_(domain) {
  if (nx < 2 || ny < 2) {
    throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 elements per axis");
  }
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "grid domain must have positive extents");
  }
  hx_ = domain.width() / nx;
  hy_ = domain.height() / ny;
}

Rect Grid::element_rect(int e) const {
  const auto [i, j] = element_ij(e);
  const double x0 = domain_.x0 + i * hx_;
  const double y0 = domain_.y0 + j * hy_;
  // The last row/column ends exactly on the domain boundary.
  const double x1 = (i + 1 == nx_) ? domain_.x1 : domain_.x0 + (i + 1) * hx_;
  const double y1 = (j + 1 == ny_) ? domain_.y1 : domain_.y0 + (j + 1) * hy_;
  return {x0, y0, x1, y1};
}

std::array<int, 4> Grid::element_edges(int e) const {
  const auto [i, j] = element_ij(e);
  return {horizontal_edge(i, j), vertical_edge(i + 1, j), horizontal_edge(i, j + 1),
          vertical_edge(i, j)};
}

std::array<int, 4> Grid::element_vertices(int e) const {
  const auto [i, j] = element_ij(e);
  return {vertex_id(i, j), vertex_id(i + 1, j), vertex_id(i + 1, j + 1), vertex_id(i, j + 1)};
}

std::array<Point, 4> Grid::element_corners(int e) const {
  const Rect r = element_rect(e);
  return {Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1}, Point{r.x0, r.y1}};
}

Point Grid::vertex(int v) const {
  const auto [i, j] = vertex_ij(v);
  const double x = (i == nx_) ? domain_.x1 : domain_.x0 + i * hx_;
  const double y = (j == ny_) ? domain_.y1 : domain_.y0 + j * hy_;
  return {x, y};
}

bool Grid::is_boundary_vertex(int v) const {
  const auto [i, j] = vertex_ij(v);
  return i == 0 || j == 0 || i == nx_ || j == ny_;
}

EdgeInfo Grid::edge(int id) const {
  EdgeInfo info;
  const int n_horizontal = nx_ * (ny_ + 1);
  if (id < n_horizontal) {
    info.orientation = EdgeOrientation::Horizontal;
    info.i = id % nx_;
    info.j = id / nx_;
    info.a = vertex(vertex_id(info.i, info.j));
    info.b = vertex(vertex_id(info.i + 1, info.j));
    info.elements[0] = info.j > 0 ? element_id(info.i, info.j - 1) : -1;
    info.elements[1] = info.j < ny_ ? element_id(info.i, info.j) : -1;
  } else {
    const int local = id - n_horizontal;
    info.orientation = EdgeOrientation::Vertical;
    info.i = local % (nx_ + 1);
    info.j = local / (nx_ + 1);
    info.a = vertex(vertex_id(info.i, info.j));
    info.b = vertex(vertex_id(info.i, info.j + 1));
    info.elements[0] = info.i > 0 ? element_id(info.i - 1, info.j) : -1;
    info.elements[1] = info.i < nx_ ? element_id(info.i, info.j) : -1;
  }
  info.length = norm(info.b - info.a);
  return info;
}

int Grid::locate(Point p) const {
  int i = static_cast<int>(std::floor((p.x - domain_.x0) / hx_));
  int j = static_cast<int>(std::floor((p.y - domain_.y0) / hy_));
  i = std::clamp(i, 0, nx_ - 1);
  j = std::clamp(j, 0, ny_ - 1);
  return element_id(i, j);
}

namespace {

double polygon_area(const std::vector<Point>& poly) {
  double twice = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    twice += cross(poly[k], poly[(k + 1) % poly.size()]);
  }
  return 0.5 * std::abs(twice);
}

std::vector<Triangle> fan_triangulate(const std::vector<Point>& poly) {
  Point c{0.0, 0.0};
  for (const Point& p : poly) c = c + p;
  c = (1.0 / static_cast<double>(poly.size())) * c;
  std::vector<Triangle> tris;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    Triangle t{c, poly[k], poly[(k + 1) % poly.size()]};
    if (t.area() > 0.0) tris.push_back(t);
  }
  return tris;
}

// Root of the level set on segment [a,b], given the snapped sides of the ends.
Point bisect_edge(const LevelSet& ls, Point a, Point b, Side side_a, double tol) {
  double lo = 0.0;
  double hi = 1.0;
  const double len = norm(b - a);
  while ((hi - lo) * len > tol) {
    const double mid = 0.5 * (lo + hi);
    const Side s = ls.eval(a + mid * (b - a)) >= 0.0 ? Side::Plus : Side::Minus;
    if (s == side_a) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return a + (0.5 * (lo + hi)) * (b - a);
}

}  // namespace

double ElementCut::plus_area() const { return polygon_area(plus_polygon); }
double ElementCut::minus_area() const { return polygon_area(minus_polygon); }

Side InterfaceGeometry::side(int e, Point p) const {
  if (const ElementCut* c = cut(e)) return c->side_of(p);
  return labels[e] == ElementLabel::Minus ? Side::Minus : Side::Plus;
}

InterfaceGeometry classify_elements(const Grid& grid, const LevelSet& level_set) {
  InterfaceGeometry geo;
  const double snap = level_set.tolerance * grid.h();
  geo.vertex_sides.resize(grid.num_vertices());
  for (int v = 0; v < grid.num_vertices(); ++v) {
    const double value = level_set.eval(grid.vertex(v));
    geo.vertex_sides[v] = (value >= 0.0 || std::abs(value) < snap) ? Side::Plus : Side::Minus;
  }

  const double root_tol = 1e-12 * grid.h();
  geo.edge_cuts.assign(grid.num_edges(), std::nullopt);
  for (int id = 0; id < grid.num_edges(); ++id) {
    const EdgeInfo info = grid.edge(id);
    int va = 0;
    int vb = 0;
    if (info.orientation == EdgeOrientation::Horizontal) {
      va = grid.vertex_id(info.i, info.j);
      vb = grid.vertex_id(info.i + 1, info.j);
    } else {
      va = grid.vertex_id(info.i, info.j);
      vb = grid.vertex_id(info.i, info.j + 1);
    }
    if (geo.vertex_sides[va] != geo.vertex_sides[vb]) {
      geo.edge_cuts[id] = bisect_edge(level_set, info.a, info.b, geo.vertex_sides[va], root_tol);
    }
  }

  geo.labels.resize(grid.num_elements());
  geo.cut_index.assign(grid.num_elements(), -1);
  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto verts = grid.element_vertices(e);
    const auto edges = grid.element_edges(e);
    const auto corners = grid.element_corners(e);
    int n_plus = 0;
    for (int v : verts) n_plus += geo.vertex_sides[v] == Side::Plus ? 1 : 0;
    if (n_plus == 4 || n_plus == 0) {
      geo.labels[e] = n_plus == 4 ? ElementLabel::Plus : ElementLabel::Minus;
      continue;
    }

    ElementCut cut;
    cut.element = e;
    std::vector<Point> points;
    int n_cut_edges = 0;
    for (int k = 0; k < 4; ++k) {
      const Side s = geo.vertex_sides[verts[k]];
      (s == Side::Plus ? cut.plus_polygon : cut.minus_polygon).push_back(corners[k]);
      if (geo.edge_cuts[edges[k]]) {
        if (n_cut_edges >= 2) {
          std::ostringstream msg;
          msg << "interface crosses element " << e
              << " more than twice; refine the mesh to resolve the interface";
          throw Error(ErrorCode::Resolution, msg.str());
        }
        const Point p = *geo.edge_cuts[edges[k]];
        cut.cut_edges[n_cut_edges++] = k;
        points.push_back(p);
        cut.plus_polygon.push_back(p);
        cut.minus_polygon.push_back(p);
      }
    }
    if (n_cut_edges != 2) {
      std::ostringstream msg;
      msg << "element " << e << " has an inconsistent interface cut; refine the mesh";
      throw Error(ErrorCode::Resolution, msg.str());
    }

    cut.E = points[0];
    cut.F = points[1];
    const Rect rect = grid.element_rect(e);
    // A cut collapsing onto a corner leaves a sliver of no measure; treat the
    // element as uncut on the side of its larger part.
    if (norm(cut.F - cut.E) < 1e-8 * grid.h() ||
        std::min(cut.plus_area(), cut.minus_area()) < 1e-14 * rect.area()) {
      geo.labels[e] = cut.plus_area() >= cut.minus_area() ? ElementLabel::Plus : ElementLabel::Minus;
      continue;
    }

    cut.G = midpoint(cut.E, cut.F);
    const Point t = cut.F - cut.E;
    Point n{-t.y / norm(t), t.x / norm(t)};
    double orient = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double d = dot(corners[k] - cut.G, n);
      orient += geo.vertex_sides[verts[k]] == Side::Plus ? d : -d;
    }
    if (orient < 0.0) n = -1.0 * n;
    cut.normal = n;
    cut.plus_triangles = fan_triangulate(cut.plus_polygon);
    cut.minus_triangles = fan_triangulate(cut.minus_polygon);

    geo.labels[e] = ElementLabel::Cut;
    geo.cut_index[e] = static_cast<int>(geo.cuts.size());
    geo.cuts.push_back(std::move(cut));
  }
  return geo;
}

InterfaceGeometry uniform_geometry(const Grid& grid) {
  LevelSet ls{[](Point) { return 1.0; }};
  return classify_elements(grid, ls);
}

std::vector<DualVolume> build_dual_volumes(const Grid& grid) {
  std::vector<DualVolume> volumes(grid.num_vertices());
  for (int v = 0; v < grid.num_vertices(); ++v) volumes[v].vertex = v;

  for (int e = 0; e < grid.num_elements(); ++e) {
    const auto verts = grid.element_vertices(e);
    const auto corners = grid.element_corners(e);
    const Rect rect = grid.element_rect(e);
    const Point center = rect.center();
    const auto [ei, ej] = grid.element_ij(e);
    for (int k = 0; k < 4; ++k) {
      DualVolume& vol = volumes[verts[k]];
      vol.elements.push_back(e);
      vol.area += 0.25 * rect.area();
      // Two neighbours of corner k inside this element: along x and along y.
      const int along_x = (k == 0) ? 1 : (k == 1) ? 0 : (k == 2) ? 3 : 2;
      const int along_y = (k == 0) ? 3 : (k == 1) ? 2 : (k == 2) ? 1 : 0;
      for (int nb : {along_x, along_y}) {
        DualSegment seg;
        seg.a = midpoint(corners[k], corners[nb]);
        seg.b = center;
        seg.midpoint = midpoint(seg.a, seg.b);
        seg.length = norm(seg.b - seg.a);
        const Point dir = corners[nb] - corners[k];
        seg.normal = (1.0 / norm(dir)) * dir;
        seg.element = e;
        seg.neighbor = verts[nb];
        vol.segments.push_back(seg);
      }
      // Faces of the dual volume lying on the domain boundary.
      const bool bottom = ej == 0 && (k == 0 || k == 1);
      const bool top = ej == grid.ny() - 1 && (k == 2 || k == 3);
      const bool left = ei == 0 && (k == 0 || k == 3);
      const bool right = ei == grid.nx() - 1 && (k == 1 || k == 2);
      auto add_face = [&](int nb, Point outward) {
        DualSegment seg;
        seg.a = corners[k];
        seg.b = midpoint(corners[k], corners[nb]);
        seg.midpoint = midpoint(seg.a, seg.b);
        seg.length = norm(seg.b - seg.a);
        seg.normal = outward;
        seg.element = e;
        seg.boundary = true;
        vol.segments.push_back(seg);
      };
      if (bottom) add_face(k == 0 ? 1 : 0, {0.0, -1.0});
      if (top) add_face(k == 2 ? 3 : 2, {0.0, 1.0});
      if (left) add_face(k == 0 ? 3 : 0, {-1.0, 0.0});
      if (right) add_face(k == 1 ? 2 : 1, {1.0, 0.0});
    }
  }
  for (DualVolume& vol : volumes) {
    std::stable_partition(vol.segments.begin(), vol.segments.end(),
                          [](const DualSegment& s) { return !s.boundary; });
  }
  return volumes;
}

}  // namespace impes
