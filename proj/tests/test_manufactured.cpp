#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "impes/error.hpp"
#include "impes/manufactured.hpp"
#include "oracles.hpp"

using namespace impes;

namespace {

struct SourceCheck {
  double worst_total = 0.0;
  double worst_wetting = 0.0;
  int points = 0;
};

// Relative error with a floor at 1e-3 of the largest magnitude seen, so
// isolated zeros of a source do not dominate.
SourceCheck compare_sources(const ManufacturedCase& c, int count, unsigned seed) {
  std::mt19937 rng(seed);
  // The stencil stays inside the domain, where the profiles are meaningful.
  const double h = 1e-2;
  std::uniform_real_distribution<double> ux(c.domain.x0 + h, c.domain.x1 - h);
  std::uniform_real_distribution<double> uy(c.domain.y0 + h, c.domain.y1 - h);
  std::uniform_real_distribution<double> ut(0.05, 0.95 * c.final_time);
  std::vector<std::array<double, 4>> rows;
  double max_total = 0.0, max_wetting = 0.0;
  while (static_cast<int>(rows.size()) < count) {
    const Point x{ux(rng), uy(rng)};
    const double t = ut(rng);
    // Off-interface: the whole stencil stays on one side.
    bool same_side = true;
    for (double dx : {-h, 0.0, h}) {
      for (double dy : {-h, 0.0, h}) same_side = same_side && c.side({x.x + dx, x.y + dy}) == c.side(x);
    }
    if (!same_side) continue;
    const SourceValue exact = c.sources(x, t);
    const SourceValue fd = oracle::fd_sources(c, x, t, h);
    rows.push_back({exact.total, fd.total, exact.wetting, fd.wetting});
    max_total = std::max(max_total, std::abs(exact.total));
    max_wetting = std::max(max_wetting, std::abs(exact.wetting));
  }
  SourceCheck out;
  out.points = count;
  for (const auto& r : rows) {
    out.worst_total = std::max(out.worst_total,
                               std::abs(r[0] - r[1]) / std::max(std::abs(r[0]), 1e-3 * max_total));
    out.worst_wetting = std::max(out.worst_wetting,
                                 std::abs(r[2] - r[3]) / std::max(std::abs(r[2]), 1e-3 * max_wetting));
  }
  return out;
}

}  // namespace

class SourceOracle : public ::testing::TestWithParam<std::string> {};

TEST_P(SourceOracle, MatchesFiniteDifferences) {
  const SourceCheck r = compare_sources(make_case(GetParam()), 2500, 11);
  EXPECT_LT(r.worst_total, 1e-5);
  EXPECT_LT(r.worst_wetting, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Cases, SourceOracle, ::testing::Values("ex1", "ex2", "ex3a", "ex3b"));

TEST(ManufacturedCase, InterfaceConditionsHold) {
  for (const std::string& id : case_ids()) {
    const ManufacturedCase c = make_case(id);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int found = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 4000 && found < 500; ++trial) {
      // Bisect along a random segment for a point on L = 0.
      Point a{c.domain.x0 + u(rng) * c.domain.width(), c.domain.y0 + u(rng) * c.domain.height()};
      Point b{c.domain.x0 + u(rng) * c.domain.width(), c.domain.y0 + u(rng) * c.domain.height()};
      if ((c.level_set(a) >= 0.0) == (c.level_set(b) >= 0.0)) continue;
      for (int it = 0; it < 80; ++it) {
        const Point m = midpoint(a, b);
        ((c.level_set(m) >= 0.0) == (c.level_set(a) >= 0.0) ? a : b) = m;
      }
      const Point x = midpoint(a, b);
      const double t = u(rng);
      const Jet pp = c.pressure(x, t, Side::Plus), pm = c.pressure(x, t, Side::Minus);
      const Jet sp = c.saturation(x, t, Side::Plus), sm = c.saturation(x, t, Side::Minus);
      // Normal from finite differences of the level set.
      const double e = 1e-7;
      Point n{(c.level_set({x.x + e, x.y}) - c.level_set({x.x - e, x.y})) / (2 * e),
              (c.level_set({x.x, x.y + e}) - c.level_set({x.x, x.y - e})) / (2 * e)};
      n = (1.0 / norm(n)) * n;
      const double kp = c.permeability.plus, km = c.permeability.minus;
      const double lam = c.fluid.lambda(sp.v);
      const double flux_p = lam * kp * (pp.dx() * n.x + pp.dy() * n.y);
      const double flux_m = lam * km * (pm.dx() * n.x + pm.dy() * n.y);
      const double cap_p = kp * (sp.dx() * n.x + sp.dy() * n.y);
      const double cap_m = km * (sm.dx() * n.x + sm.dy() * n.y);
      worst = std::max({worst, std::abs(pp.v - pm.v), std::abs(sp.v - sm.v), std::abs(flux_p - flux_m)});
      // The capillary flux condition applies only with capillary pressure.
      if (c.fluid.entry_pressure > 0.0) worst = std::max(worst, std::abs(cap_p - cap_m));
      ++found;
    }
    EXPECT_GT(found, 100) << id;
    EXPECT_LT(worst, 1e-8) << id;
  }
}

TEST(ManufacturedCase, SaturationWithinUnitInterval) {
  for (const std::string& id : case_ids()) {
    const ManufacturedCase c = make_case(id);
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        const Point x{c.domain.x0 + i * c.domain.width() / 40, c.domain.y0 + j * c.domain.height() / 40};
        for (double t : {0.0, 0.5, 1.0}) {
          const double s = c.saturation(x, t).v;
          EXPECT_GE(s, 0.0) << id;
          EXPECT_LE(s, 1.0) << id;
        }
      }
    }
  }
}

TEST(ManufacturedCase, UnknownIdRejected) {
  try {
    make_case("bogus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST(ManufacturedCase, TimeStepMustDivideFinalTime) {
  const ManufacturedCase c = make_case("ex1");
  EXPECT_THROW(c.problem(8, 0.3), Error);
  EXPECT_EQ(c.problem(8).steps, 4);
  EXPECT_EQ(c.problem(16).steps, 16);
}
