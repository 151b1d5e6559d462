#include "impes/quadrature.hpp"

#include <array>
#include <cmath>

#include "impes/error.hpp"

namespace impes {

namespace {

struct Gauss1D {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Tabulated nodes for the orders in use.
const Gauss1D& gauss_1d(int n) {
  static const std::array<Gauss1D, 5> rules = [] {
    std::array<Gauss1D, 5> r;
    r[0] = {{0.0}, {2.0}};
    r[1] = {{-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)}, {1.0, 1.0}};
    r[2] = {{-std::sqrt(0.6), 0.0, std::sqrt(0.6)}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
    const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
    r[3] = {{-b, -a, a, b}, {wb, wa, wa, wb}};
    r[4] = {{-0.9894009349916499, -0.9445750230732326, -0.8656312023878318,
             -0.7554044083550030, -0.6178762444026438, -0.4580167776572274,
             -0.2816035507792589, -0.0950125098376374, 0.0950125098376374,
             0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
             0.7554044083550030, 0.8656312023878318, 0.9445750230732326,
             0.9894009349916499},
            {0.0271524594117541, 0.0622535239386479, 0.0951585116824928,
             0.1246289712555339, 0.1495959888165767, 0.1691565193950025,
             0.1826034150449236, 0.1894506104550685, 0.1894506104550685,
             0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
             0.1246289712555339, 0.0951585116824928, 0.0622535239386479,
             0.0271524594117541}};
    return r;
  }();
  switch (n) {
    case 1: return rules[0];
    case 2: return rules[1];
    case 3: return rules[2];
    case 4: return rules[3];
    case 16: return rules[4];
    default: throw Error(ErrorCode::InvalidArgument, "unsupported Gauss order");
  }
}

}  // namespace

QuadratureRule gauss_segment(Point a, Point b, int n) {
  const Gauss1D& g = gauss_1d(n);
  const double half = 0.5 * norm(b - a);
  QuadratureRule rule;
  rule.reserve(g.nodes.size());
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const double s = 0.5 * (1.0 + g.nodes[k]);
    rule.push_back({a + s * (b - a), half * g.weights[k]});
  }
  return rule;
}

QuadratureRule gauss_rectangle(const Rect& r, int n) {
  const Gauss1D& g = gauss_1d(n);
  const double hx = 0.5 * r.width();
  const double hy = 0.5 * r.height();
  const Point c = r.center();
  QuadratureRule rule;
  rule.reserve(g.nodes.size() * g.nodes.size());
  for (std::size_t j = 0; j < g.nodes.size(); ++j) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      rule.push_back({{c.x + hx * g.nodes[i], c.y + hy * g.nodes[j]},
                      hx * hy * g.weights[i] * g.weights[j]});
    }
  }
  return rule;
}

QuadratureRule gauss_triangle(const Triangle& t) {
  constexpr double a1 = 0.445948490915964886;
  constexpr double w1 = 0.223381589678011466;
  constexpr double a2 = 0.091576213509770743;
  constexpr double w2 = 0.109951743655321868;
  constexpr std::array<std::array<double, 3>, 6> bary{{{1.0 - 2.0 * a1, a1, a1},
                                                        {a1, 1.0 - 2.0 * a1, a1},
                                                        {a1, a1, 1.0 - 2.0 * a1},
                                                        {1.0 - 2.0 * a2, a2, a2},
                                                        {a2, 1.0 - 2.0 * a2, a2},
                                                        {a2, a2, 1.0 - 2.0 * a2}}};
  const double area = t.area();
  QuadratureRule rule;
  rule.reserve(6);
  for (int k = 0; k < 6; ++k) {
    const auto& l = bary[k];
    const Point x{l[0] * t.a.x + l[1] * t.b.x + l[2] * t.c.x,
                  l[0] * t.a.y + l[1] * t.b.y + l[2] * t.c.y};
    rule.push_back({x, area * (k < 3 ? w1 : w2)});
  }
  return rule;
}

}  // namespace impes
