#include "impes/fem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "impes/error.hpp"

namespace impes {

namespace {

constexpr std::array<Point, 4> kRefCorners{Point{-1.0, -1.0}, Point{1.0, -1.0}, Point{1.0, 1.0},
                                          Point{-1.0, 1.0}};

std::array<double, 4> monomials(Point r) { return {1.0, r.x, r.y, r.x * r.x - r.y * r.y}; }

struct SubSegment {
  Point a, b;  // reference coordinates
  Side side;
};

// Pieces of local edge k with the side each piece lies on.
std::vector<SubSegment> edge_pieces(const ElementMap& map, const ElementCut& cut, int k) {
  const Point a = kRefCorners[k];
  const Point b = kRefCorners[(k + 1) % 4];
  const Side side_a = cut.side_of(map.to_phys(a));
  const Side side_b = cut.side_of(map.to_phys(b));
  for (int c = 0; c < 2; ++c) {
    if (cut.cut_edges[c] == k) {
      const Point p = map.to_ref(c == 0 ? cut.E : cut.F);
      return {{a, p, side_a}, {p, b, side_b}};
    }
  }
  return {{a, b, side_a}};
}

}  // namespace

const std::array<RotatedQ1Poly, 4>& reference_basis() {
  static const std::array<RotatedQ1Poly, 4> basis = [] {
    // dof(j, m): average of monomial m over edge j.
    Eigen::Matrix4d dof;
    for (int j = 0; j < 4; ++j) {
      const Point a = kRefCorners[j];
      const Point b = kRefCorners[(j + 1) % 4];
      Eigen::Vector4d avg = Eigen::Vector4d::Zero();
      for (const QuadPoint& q : gauss_segment(a, b, 3)) {
        const auto m = monomials(q.x);
        for (int c = 0; c < 4; ++c) avg[c] += 0.5 * q.w * m[c];
      }
      dof.row(j) = avg.transpose();
    }
    const Eigen::Matrix4d coeffs = dof.inverse();
    std::array<RotatedQ1Poly, 4> out;
    for (int i = 0; i < 4; ++i) {
      for (int c = 0; c < 4; ++c) out[i].c[c] = coeffs(c, i);
    }
    return out;
  }();
  return basis;
}

ImmersedMatrix immersed_system(const Rect& rect, const ElementCut& cut, double beta_plus,
                               double beta_minus) {
  const ElementMap map(rect);
  ImmersedMatrix A = ImmersedMatrix::Zero();

  for (int k = 0; k < 4; ++k) {
    for (const SubSegment& piece : edge_pieces(map, cut, k)) {
      const int offset = piece.side == Side::Plus ? 0 : 4;
      for (const QuadPoint& q : gauss_segment(piece.a, piece.b, 3)) {
        const auto m = monomials(q.x);
        for (int c = 0; c < 4; ++c) A(k, offset + c) += 0.5 * q.w * m[c];
      }
    }
  }

  const auto mE = monomials(map.to_ref(cut.E));
  const auto mF = monomials(map.to_ref(cut.F));
  for (int c = 0; c < 4; ++c) {
    A(4, c) = mE[c];
    A(4, 4 + c) = -mE[c];
    A(5, c) = mF[c];
    A(5, 4 + c) = -mF[c];
  }
  A(6, 3) = 1.0;
  A(6, 7) = -1.0;

  // beta * grad(phi) . n at G, scaled to O(1).
  const Point g = map.to_ref(cut.G);
  const double scale = std::max(map.sx(), map.sy()) * std::max(beta_plus, beta_minus);
  const double nx = map.sx() * cut.normal.x / scale;
  const double ny = map.sy() * cut.normal.y / scale;
  const std::array<double, 4> flux{0.0, nx, ny, 2.0 * g.x * nx - 2.0 * g.y * ny};
  for (int c = 0; c < 4; ++c) {
    A(7, c) = beta_plus * flux[c];
    A(7, 4 + c) = -beta_minus * flux[c];
  }
  return A;
}

std::array<ShapeFunction, 4> immersed_basis(const Rect& rect, const ElementCut& cut,
                                            double beta_plus, double beta_minus) {
  if (!(beta_plus > 0.0) || !(beta_minus > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "immersed basis needs positive coefficients");
  }
  const ImmersedMatrix A = immersed_system(rect, cut, beta_plus, beta_minus);
  const Eigen::PartialPivLU<ImmersedMatrix> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    std::ostringstream msg;
    msg << "degenerate interface cut in element " << cut.element << " (rcond " << rcond << ")";
    throw Error(ErrorCode::DegenerateCut, msg.str());
  }
  Eigen::Matrix<double, 8, 4> rhs = Eigen::Matrix<double, 8, 4>::Zero();
  rhs.topRows<4>().setIdentity();
  const Eigen::Matrix<double, 8, 4> sol = lu.solve(rhs);

  std::array<ShapeFunction, 4> shapes;
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 4; ++c) {
      shapes[i].plus.c[c] = sol(c, i);
      shapes[i].minus.c[c] = sol(4 + c, i);
    }
  }
  return shapes;
}

ShapeFunction immersed_shape(const Rect& rect, const ElementCut& cut, double beta_plus,
                             double beta_minus, int edge) {
  return immersed_basis(rect, cut, beta_plus, beta_minus).at(edge);
}

ElementBasis::ElementBasis(int element, const Rect& rect) : element_(element), map_(rect) {
  const auto& ref = reference_basis();
  for (int i = 0; i < 4; ++i) shapes_[i] = {ref[i], ref[i]};
}

ElementBasis::ElementBasis(int element, const Rect& rect, const ElementCut& cut,
                           double beta_plus, double beta_minus)
    : element_(element),
      cut_(true),
      map_(rect),
      shapes_(immersed_basis(rect, cut, beta_plus, beta_minus)),
      chord_mid_(cut.G),
      chord_normal_(cut.normal),
      beta_plus_(beta_plus),
      beta_minus_(beta_minus) {}

BasisEval ElementBasis::eval(int i, Point x, Side side) const {
  const RotatedQ1Poly& piece = side == Side::Plus ? shapes_[i].plus : shapes_[i].minus;
  const Point r = map_.to_ref(x);
  return {piece.value(r), map_.phys_gradient(piece.ref_gradient(r))};
}

std::vector<SidedQuadPoint> element_quadrature(const Grid& grid, const InterfaceGeometry& geo,
                                               int element) {
  std::vector<SidedQuadPoint> pts;
  if (const ElementCut* cut = geo.cut(element)) {
    pts.reserve(6 * (cut->plus_triangles.size() + cut->minus_triangles.size()));
    for (const Triangle& t : cut->plus_triangles) {
      for (const QuadPoint& q : gauss_triangle(t)) pts.push_back({q.x, q.w, Side::Plus});
    }
    for (const Triangle& t : cut->minus_triangles) {
      for (const QuadPoint& q : gauss_triangle(t)) pts.push_back({q.x, q.w, Side::Minus});
    }
    return pts;
  }
  const Side side = geo.labels[element] == ElementLabel::Minus ? Side::Minus : Side::Plus;
  for (const QuadPoint& q : gauss_rectangle(grid.element_rect(element), 3)) {
    pts.push_back({q.x, q.w, side});
  }
  return pts;
}

double ImmersedResiduals::max() const {
  return std::max({edge_average, continuity, quadratic, flux});
}

ImmersedResiduals immersed_residuals(const Rect& rect, const ElementCut& cut, double beta_plus,
                                     double beta_minus, const ShapeFunction& shape,
                                     const std::array<double, 4>& edge_values) {
  const ElementMap map(rect);
  ImmersedResiduals res;
  const auto corners = std::array<Point, 4>{Point{rect.x0, rect.y0}, Point{rect.x1, rect.y0},
                                            Point{rect.x1, rect.y1}, Point{rect.x0, rect.y1}};
  for (int k = 0; k < 4; ++k) {
    const Point a = corners[k];
    const Point b = corners[(k + 1) % 4];
    std::vector<std::pair<Point, Point>> parts{{a, b}};
    for (int c = 0; c < 2; ++c) {
      if (cut.cut_edges[c] == k) {
        const Point p = c == 0 ? cut.E : cut.F;
        parts = {{a, p}, {p, b}};
      }
    }
    double integral = 0.0;
    for (const auto& [pa, pb] : parts) {
      if (norm(pb - pa) == 0.0) continue;
      const Side side = cut.side_of(midpoint(pa, pb));
      const RotatedQ1Poly& piece = side == Side::Plus ? shape.plus : shape.minus;
      for (const QuadPoint& q : gauss_segment(pa, pb, 16)) {
        integral += q.w * piece.value(map.to_ref(q.x));
      }
    }
    res.edge_average = std::max(res.edge_average,
                                std::abs(integral / norm(b - a) - edge_values[k]));
  }

  for (Point p : {cut.E, cut.F}) {
    const Point r = map.to_ref(p);
    res.continuity = std::max(res.continuity, std::abs(shape.plus.value(r) - shape.minus.value(r)));
  }
  res.quadratic = std::abs(shape.plus.c[3] - shape.minus.c[3]);

  const Point rg = map.to_ref(cut.G);
  const Point gp = map.phys_gradient(shape.plus.ref_gradient(rg));
  const Point gm = map.phys_gradient(shape.minus.ref_gradient(rg));
  const double flux_plus = beta_plus * dot(gp, cut.normal);
  const double flux_minus = beta_minus * dot(gm, cut.normal);
  const double scale =
      std::max(beta_plus, beta_minus) * std::max({norm(gp), norm(gm), std::max(map.sx(), map.sy())});
  res.flux = std::abs(flux_plus - flux_minus) / scale;
  return res;
}

}  // namespace impes
