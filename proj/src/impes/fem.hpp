#pragma once

#include <array>

#include <Eigen/Dense>

#include "impes/geometry.hpp"
#include "impes/mesh.hpp"
#include "impes/quadrature.hpp"

namespace impes {

/// a + b*xi + c*eta + d*(xi^2 - eta^2) on the reference square [-1,1]^2.
struct RotatedQ1Poly {
  std::array<double, 4> c{};

  double value(Point ref) const {
    return c[0] + c[1] * ref.x + c[2] * ref.y + c[3] * (ref.x * ref.x - ref.y * ref.y);
  }
  Point ref_gradient(Point ref) const {
    return {c[1] + 2.0 * c[3] * ref.x, c[2] - 2.0 * c[3] * ref.y};
  }
};

/// Affine map between an axis-aligned rectangle and [-1,1]^2.
class ElementMap {
 public:
  explicit ElementMap(const Rect& rect)
      : center_(rect.center()), sx_(2.0 / rect.width()), sy_(2.0 / rect.height()) {}

  Point to_ref(Point x) const { return {(x.x - center_.x) * sx_, (x.y - center_.y) * sy_}; }
  Point to_phys(Point r) const { return {center_.x + r.x / sx_, center_.y + r.y / sy_}; }
  Point phys_gradient(Point ref_grad) const { return {ref_grad.x * sx_, ref_grad.y * sy_}; }
  double sx() const { return sx_; }
  double sy() const { return sy_; }

 private:
  Point center_;
  double sx_;
  double sy_;
};

/// Rotated-Q1 shape functions dual to the edge averages on
/// (bottom, right, top, left) of the reference square.
const std::array<RotatedQ1Poly, 4>& reference_basis();

/// Piecewise shape function; uncut elements carry identical pieces.
struct ShapeFunction {
  RotatedQ1Poly plus;
  RotatedQ1Poly minus;
};

using ImmersedMatrix = Eigen::Matrix<double, 8, 8>;

/// Interface conditions for a cut element as an 8x8 system acting on
/// (plus coefficients, minus coefficients). Rows: four edge averages,
/// continuity at E and F, equal quadratic coefficients, flux match at G.
ImmersedMatrix immersed_system(const Rect& rect, const ElementCut& cut, double beta_plus,
                               double beta_minus);

/// All four immersed shape functions; Error(DegenerateCut) if the system is
/// singular or its reciprocal condition estimate falls below 1e-12.
std::array<ShapeFunction, 4> immersed_basis(const Rect& rect, const ElementCut& cut,
                                            double beta_plus, double beta_minus);

ShapeFunction immersed_shape(const Rect& rect, const ElementCut& cut, double beta_plus,
                             double beta_minus, int edge);

struct BasisEval {
  double value = 0.0;
  Point gradient;  // physical
};

/// Local basis of one element (standard or immersed).
class ElementBasis {
 public:
  ElementBasis(int element, const Rect& rect);
  ElementBasis(int element, const Rect& rect, const ElementCut& cut, double beta_plus,
               double beta_minus);

  int element() const { return element_; }
  bool is_cut() const { return cut_; }
  double beta_plus() const { return beta_plus_; }
  double beta_minus() const { return beta_minus_; }
  const ElementMap& map() const { return map_; }
  const ShapeFunction& shape(int i) const { return shapes_[i]; }

  Side side_of(Point x) const {
    if (!cut_) return Side::Plus;
    return dot(x - chord_mid_, chord_normal_) >= 0.0 ? Side::Plus : Side::Minus;
  }

  BasisEval eval(int i, Point x, Side side) const;
  BasisEval eval(int i, Point x) const { return eval(i, x, side_of(x)); }

 private:
  int element_;
  bool cut_ = false;
  ElementMap map_;
  std::array<ShapeFunction, 4> shapes_;
  Point chord_mid_;
  Point chord_normal_;
  double beta_plus_ = 1.0;
  double beta_minus_ = 1.0;
};

/// Quadrature over an element split by side: on uncut elements a 3x3 Gauss
/// rule tagged with the element label, on cut elements the degree-4 rule on
/// each sub-triangle.
struct SidedQuadPoint {
  Point x;
  double w = 0.0;
  Side side = Side::Plus;
};

std::vector<SidedQuadPoint> element_quadrature(const Grid& grid, const InterfaceGeometry& geo,
                                               int element);

/// Residuals of the four interface condition groups for one immersed shape
/// function, evaluated directly (not through the assembled matrix).
struct ImmersedResiduals {
  double edge_average = 0.0;
  double continuity = 0.0;
  double quadratic = 0.0;
  double flux = 0.0;  // relative to beta_max * max|grad|

  double max() const;
};

ImmersedResiduals immersed_residuals(const Rect& rect, const ElementCut& cut, double beta_plus,
                                     double beta_minus, const ShapeFunction& shape,
                                     const std::array<double, 4>& edge_values);

}  // namespace impes
