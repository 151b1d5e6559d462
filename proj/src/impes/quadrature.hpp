#pragma once

#include <vector>

#include "impes/geometry.hpp"

namespace impes {

struct QuadPoint {
  Point x;
  double w = 0.0;
};

using QuadratureRule = std::vector<QuadPoint>;

/// Gauss-Legendre rule with n points (n = 1..4, 16) on the segment [a,b];
/// weights sum to |b-a|.
QuadratureRule gauss_segment(Point a, Point b, int n = 3);

/// Tensor Gauss rule, n x n points.
QuadratureRule gauss_rectangle(const Rect& r, int n = 3);

/// Six-point rule exact for polynomials of degree 4.
QuadratureRule gauss_triangle(const Triangle& t);

}  // namespace impes
