#pragma once

#include <algorithm>
#include <cmath>

#include "impes/jet.hpp"

namespace impes {

namespace detail {

inline double clamp_to(double s, double lo, double hi) { return std::clamp(s, lo, hi); }
template <int N>
BasicJet<N> clamp_to(const BasicJet<N>& s, double lo, double hi) {
  if (s.v < lo) return BasicJet<N>(lo);
  if (s.v > hi) return BasicJet<N>(hi);
  return s;
}

}  // namespace detail

/// Brooks-Corey (index 2) two-phase constitutive model.
struct FluidModel {
  double mu_w = 1.0;        // Pa s
  double mu_n = 1.0;        // Pa s
  double porosity = 1.0;
  double rho_w = 1000.0;    // kg/m^3, incompressible: stored only
  double rho_n = 1000.0;
  double entry_pressure = 0.0;  // Pa
  double sat_clamp = 1e-6;

  /// Throws Error(InvalidArgument) on nonphysical parameters.
  void validate() const;

  template <class T>
  T krw(const T& s) const {
    const T c = detail::clamp_to(s, 0.0, 1.0);
    return c * c * c * c;
  }

  template <class T>
  T krn(const T& s) const {
    const T c = detail::clamp_to(s, 0.0, 1.0);
    const T one_minus = 1.0 - c;
    return one_minus * one_minus * (1.0 - c * c);
  }

  template <class T>
  T lambda_w(const T& s) const { return krw(s) / mu_w; }
  template <class T>
  T lambda_n(const T& s) const { return krn(s) / mu_n; }
  template <class T>
  T lambda(const T& s) const { return lambda_w(s) + lambda_n(s); }
  template <class T>
  T frac_w(const T& s) const { return lambda_w(s) / lambda(s); }

  /// p_c = p_d S^{-1/2}, with S clamped to [sat_clamp, 1].
  template <class T>
  T pc(const T& s) const {
    using std::pow;
    return entry_pressure * pow(detail::clamp_to(s, sat_clamp, 1.0), -0.5);
  }

  double dpc_ds(double s) const {
    const double c = std::clamp(s, sat_clamp, 1.0);
    return -0.5 * entry_pressure * std::pow(c, -1.5);
  }

  bool has_capillarity() const { return entry_pressure != 0.0; }
};

struct Mobilities {
  double wetting = 0.0;
  double nonwetting = 0.0;
  double total = 0.0;
  double frac_wetting = 0.0;
};

inline Mobilities mobilities(const FluidModel& fluid, double s) {
  Mobilities m;
  m.wetting = fluid.lambda_w(s);
  m.nonwetting = fluid.lambda_n(s);
  m.total = m.wetting + m.nonwetting;
  m.frac_wetting = m.wetting / m.total;
  return m;
}

}  // namespace impes
