#pragma once

#include <array>
#include <cmath>

namespace impes {

/// Truncated second-order Taylor expansion in N variables: value, gradient
/// and Hessian propagated exactly through arithmetic and elementary functions.
/// Used to differentiate closed-form exact solutions.
template <int N>
struct BasicJet {
  static constexpr int kVars = N;

  double v = 0.0;
  std::array<double, kVars> g{};
  std::array<std::array<double, kVars>, kVars> H{};

  BasicJet() = default;
  BasicJet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static BasicJet variable(double value, int index) {
    BasicJet j(value);
    j.g[index] = 1.0;
    return j;
  }

  double dx() const { return g[0]; }
  double dy() const { return g[1]; }
  double dt() const { return g[2]; }
  double laplacian() const { return H[0][0] + H[1][1]; }

  /// Chain rule for a scalar function with derivatives f1 = f'(v), f2 = f''(v).
  BasicJet apply(double fv, double f1, double f2) const {
    BasicJet r(fv);
    for (int a = 0; a < kVars; ++a) {
      r.g[a] = f1 * g[a];
      for (int b = 0; b < kVars; ++b) r.H[a][b] = f1 * H[a][b] + f2 * g[a] * g[b];
    }
    return r;
  }

  BasicJet& operator+=(const BasicJet& o) {
    v += o.v;
    for (int a = 0; a < kVars; ++a) {
      g[a] += o.g[a];
      for (int b = 0; b < kVars; ++b) H[a][b] += o.H[a][b];
    }
    return *this;
  }
  BasicJet& operator-=(const BasicJet& o) { return *this += -o; }
  BasicJet& operator*=(const BasicJet& o) { return *this = *this * o; }

  friend BasicJet operator-(const BasicJet& a) { return a.apply(-a.v, -1.0, 0.0); }
  friend BasicJet operator+(BasicJet a, const BasicJet& b) { return a += b; }
  friend BasicJet operator-(BasicJet a, const BasicJet& b) { return a -= b; }
  friend BasicJet operator*(const BasicJet& a, const BasicJet& b) {
    BasicJet r(a.v * b.v);
    for (int i = 0; i < kVars; ++i) {
      r.g[i] = a.v * b.g[i] + b.v * a.g[i];
      for (int k = 0; k < kVars; ++k) {
        r.H[i][k] = a.v * b.H[i][k] + b.v * a.H[i][k] + a.g[i] * b.g[k] + b.g[i] * a.g[k];
      }
    }
    return r;
  }
  friend BasicJet operator/(const BasicJet& a, const BasicJet& b) {
    const double inv = 1.0 / b.v;
    return a * b.apply(inv, -inv * inv, 2.0 * inv * inv * inv);
  }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const BasicJet<N>& x) { return x.v; }

/// Derivatives in (x, y, t).
using Jet = BasicJet<3>;
/// Value, first and second derivative of a scalar function of one variable.
using Dual2 = BasicJet<1>;

template <int N>
BasicJet<N> exp(const BasicJet<N>& a) {
  const double e = std::exp(a.v);
  return a.apply(e, e, e);
}
template <int N>
BasicJet<N> cos(const BasicJet<N>& a) {
  return a.apply(std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}
template <int N>
BasicJet<N> sin(const BasicJet<N>& a) {
  return a.apply(std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}
template <int N>
BasicJet<N> pow(const BasicJet<N>& a, double p) {
  return a.apply(std::pow(a.v, p), p * std::pow(a.v, p - 1.0),
                 p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

}  // namespace impes
