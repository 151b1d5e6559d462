#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

namespace {

// Average over the reference segment a->b of 1, xi, eta, xi^2 - eta^2.
Eigen::Vector4d segment_monomial_average(Point a, Point b) {
  const Point d = b - a;
  const double xx = a.x * a.x + a.x * d.x + d.x * d.x / 3.0;
  const double yy = a.y * a.y + a.y * d.y + d.y * d.y / 3.0;
  return {1.0, a.x + 0.5 * d.x, a.y + 0.5 * d.y, xx - yy};
}

Eigen::Vector4d monomials(Point r) { return {1.0, r.x, r.y, r.x * r.x - r.y * r.y}; }

Point to_ref(const impes::Rect& rect, Point x) {
  return {(2.0 * x.x - rect.x0 - rect.x1) / rect.width(),
          (2.0 * x.y - rect.y0 - rect.y1) / rect.height()};
}

std::array<Point, 4> corners(const impes::Rect& r) {
  return {Point{r.x0, r.y0}, Point{r.x1, r.y0}, Point{r.x1, r.y1}, Point{r.x0, r.y1}};
}

struct Piece {
  Point a, b;  // physical
  bool plus;
};

std::vector<Piece> edge_pieces(const impes::Rect& rect, const impes::ElementCut& cut, int k) {
  const auto c = corners(rect);
  const Point a = c[k];
  const Point b = c[(k + 1) % 4];
  std::vector<std::pair<Point, Point>> parts{{a, b}};
  if (cut.cut_edges[0] == k) parts = {{a, cut.E}, {cut.E, b}};
  if (cut.cut_edges[1] == k) parts = {{a, cut.F}, {cut.F, b}};
  std::vector<Piece> out;
  for (const auto& [pa, pb] : parts) {
    const Point m = impes::midpoint(pa, pb);
    out.push_back({pa, pb, impes::dot(m - cut.G, cut.normal) >= 0.0});
  }
  return out;
}

// Gradient in physical coordinates of a + b xi + c eta + d (xi^2 - eta^2).
Point phys_gradient(const impes::Rect& rect, const double* coef, Point r) {
  return {(coef[1] + 2.0 * coef[3] * r.x) * 2.0 / rect.width(),
          (coef[2] - 2.0 * coef[3] * r.y) * 2.0 / rect.height()};
}

}  // namespace

ShapeCoefficients immersed_shapes(const impes::Rect& rect, const impes::ElementCut& cut,
                                  double beta_plus, double beta_minus) {
  Eigen::Matrix<double, 8, 8> A = Eigen::Matrix<double, 8, 8>::Zero();
  for (int k = 0; k < 4; ++k) {
    const double edge_length = (k % 2 == 0) ? rect.width() : rect.height();
    for (const Piece& p : edge_pieces(rect, cut, k)) {
      const double weight = impes::norm(p.b - p.a) / edge_length;
      const Eigen::Vector4d avg = segment_monomial_average(to_ref(rect, p.a), to_ref(rect, p.b));
      A.block<1, 4>(k, p.plus ? 0 : 4) += weight * avg.transpose();
    }
  }
  const Eigen::Vector4d mE = monomials(to_ref(rect, cut.E));
  const Eigen::Vector4d mF = monomials(to_ref(rect, cut.F));
  A.block<1, 4>(4, 0) = mE.transpose();
  A.block<1, 4>(4, 4) = -mE.transpose();
  A.block<1, 4>(5, 0) = mF.transpose();
  A.block<1, 4>(5, 4) = -mF.transpose();
  A(6, 3) = 1.0;
  A(6, 7) = -1.0;
  const Point g = to_ref(rect, cut.G);
  const double sx = 2.0 / rect.width();
  const double sy = 2.0 / rect.height();
  const Eigen::Vector4d dn{0.0, sx * cut.normal.x, sy * cut.normal.y,
                           2.0 * g.x * sx * cut.normal.x - 2.0 * g.y * sy * cut.normal.y};
  A.block<1, 4>(7, 0) = beta_plus * dn.transpose();
  A.block<1, 4>(7, 4) = -beta_minus * dn.transpose();

  Eigen::Matrix<double, 8, 4> rhs = Eigen::Matrix<double, 8, 4>::Zero();
  rhs.topRows<4>().setIdentity();
  return Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>>(A).solve(rhs);
}

double immersed_residual(const impes::Rect& rect, const impes::ElementCut& cut, double beta_plus,
                         double beta_minus, const std::array<impes::ShapeFunction, 4>& shapes) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double* plus = shapes[i].plus.c.data();
    const double* minus = shapes[i].minus.c.data();
    for (int k = 0; k < 4; ++k) {
      const double edge_length = (k % 2 == 0) ? rect.width() : rect.height();
      double avg = 0.0;
      for (const Piece& p : edge_pieces(rect, cut, k)) {
        const Eigen::Vector4d m = segment_monomial_average(to_ref(rect, p.a), to_ref(rect, p.b));
        const double* c = p.plus ? plus : minus;
        avg += impes::norm(p.b - p.a) / edge_length *
               (c[0] * m[0] + c[1] * m[1] + c[2] * m[2] + c[3] * m[3]);
      }
      worst = std::max(worst, std::abs(avg - (i == k ? 1.0 : 0.0)));
    }
    for (Point x : {cut.E, cut.F}) {
      const Eigen::Vector4d m = monomials(to_ref(rect, x));
      double jump = 0.0;
      for (int c = 0; c < 4; ++c) jump += (plus[c] - minus[c]) * m[c];
      worst = std::max(worst, std::abs(jump));
    }
    worst = std::max(worst, std::abs(plus[3] - minus[3]));
    const Point g = to_ref(rect, cut.G);
    const Point gp = phys_gradient(rect, plus, g);
    const Point gm = phys_gradient(rect, minus, g);
    const double scale = std::max(beta_plus, beta_minus) *
                         std::max({impes::norm(gp), impes::norm(gm), 2.0 / rect.width()});
    const double jump = beta_plus * impes::dot(gp, cut.normal) - beta_minus * impes::dot(gm, cut.normal);
    worst = std::max(worst, std::abs(jump) / scale);
  }
  return worst;
}

double partition_of_unity_defect(const std::array<impes::ShapeFunction, 4>& shapes) {
  double worst = 0.0;
  for (int c = 0; c < 4; ++c) {
    double sp = 0.0, sm = 0.0;
    for (const auto& s : shapes) {
      sp += s.plus.c[c];
      sm += s.minus.c[c];
    }
    const double target = c == 0 ? 1.0 : 0.0;
    worst = std::max({worst, std::abs(sp - target), std::abs(sm - target)});
  }
  return worst;
}

namespace {

struct Fields {
  double p, s;
};

impes::SourceValue fd_sources_once(const impes::ManufacturedCase& c, Point x, double t, double h,
                                   impes::Side side) {
  const impes::FluidModel& f = c.fluid;
  const double k = c.permeability(side);
  auto at = [&](double dx, double dy, double tt) {
    const Point y{x.x + dx, x.y + dy};
    return Fields{c.pressure(y, tt, side).v, c.saturation(y, tt, side).v};
  };
  // Face values at x +- h/2 along each axis: total flux, wetting advective
  // flux and capillary flux, from the two cell values adjacent to the face.
  double div_total = 0.0;
  double div_wetting = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    double face[2][2];  // [minus/plus face][total, wetting]
    for (int side_i = 0; side_i < 2; ++side_i) {
      const double sign = side_i == 0 ? -1.0 : 1.0;
      const double d_in = sign > 0 ? 0.0 : -h;
      const double d_out = sign > 0 ? h : 0.0;
      const Fields a = axis == 0 ? at(d_in, 0.0, t) : at(0.0, d_in, t);
      const Fields b = axis == 0 ? at(d_out, 0.0, t) : at(0.0, d_out, t);
      const Fields mid = axis == 0 ? at(0.5 * (d_in + d_out), 0.0, t) : at(0.0, 0.5 * (d_in + d_out), t);
      const double dp = (b.p - a.p) / h;
      const double lam = f.lambda_w(mid.s) + f.lambda_n(mid.s);
      const double fw = f.lambda_w(mid.s) / lam;
      const double dpc = (f.pc(b.s) - f.pc(a.s)) / h;
      const double u = -lam * k * dp;
      face[side_i][0] = u;
      face[side_i][1] = fw * u + k * f.lambda_n(mid.s) * fw * dpc;
    }
    div_total += (face[1][0] - face[0][0]) / h;
    div_wetting += (face[1][1] - face[0][1]) / h;
  }
  const double dsdt = (at(0.0, 0.0, t + h).s - at(0.0, 0.0, t - h).s) / (2.0 * h);
  return {div_total, f.porosity * dsdt + div_wetting};
}

}  // namespace

impes::SourceValue fd_sources(const impes::ManufacturedCase& c, Point x, double t, double h) {
  const impes::Side side = c.side(x);
  const impes::SourceValue coarse = fd_sources_once(c, x, t, h, side);
  const impes::SourceValue fine = fd_sources_once(c, x, t, 0.5 * h, side);
  return {(4.0 * fine.total - coarse.total) / 3.0, (4.0 * fine.wetting - coarse.wetting) / 3.0};
}

double segment_flux(Point a, Point b, const std::function<double(Point)>& level_set,
                    const std::function<Point(Point)>& grad_p, double beta_plus,
                    double beta_minus) {
  const double len = impes::norm(b - a);
  const Point n{(b.y - a.y) / len, -(b.x - a.x) / len};
  // Split at the sign change (straight interfaces cross a segment once),
  // then integrate the piecewise-constant flux exactly.
  double split = 1.0;
  const double la = level_set(a);
  const double lb = level_set(b);
  if ((la >= 0.0) != (lb >= 0.0)) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double lm = level_set(a + mid * (b - a));
      ((lm >= 0.0) == (la >= 0.0) ? lo : hi) = mid;
    }
    split = 0.5 * (lo + hi);
  }
  double total = 0.0;
  for (auto [s0, s1] : {std::pair{0.0, split}, std::pair{split, 1.0}}) {
    if (s1 <= s0) continue;
    const Point m = a + (0.5 * (s0 + s1)) * (b - a);
    const double beta = level_set(m) >= 0.0 ? beta_plus : beta_minus;
    total += -beta * impes::dot(grad_p(m), n) * (s1 - s0) * len;
  }
  return total;
}

DualMassEntries dual_mass_entries(double hx, double hy) {
  // A quarter cell [0, hx/2] x [0, hy/2] next to vertex (0, 0): the bilinear
  // hat of the near corner integrates to (3hx/8)(3hy/8), of the neighbour
  // along x to (hx/8)(3hy/8), along y to (3hx/8)(hy/8), of the opposite corner to (hx/8)(hy/8).
  const double near = (3.0 * hx / 8.0) * (3.0 * hy / 8.0);
  const double along = (hx / 8.0) * (3.0 * hy / 8.0);
  const double opposite = (hx / 8.0) * (hy / 8.0);
  // Interior vertex: four quarters for itself; an edge neighbour is seen from
  // the two quarters adjacent to the shared edge; a diagonal one from one.
  const double along_y = (3.0 * hx / 8.0) * (hy / 8.0);
  return {4.0 * near, 2.0 * along, 2.0 * along_y, opposite};
}

}  // namespace oracle
