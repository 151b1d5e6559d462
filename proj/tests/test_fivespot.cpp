#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "impes/fivespot.hpp"
#include "impes/output.hpp"

using namespace impes;

TEST(FiveSpot, InitialSaturationBox) {
  FiveSpotConfig cfg;
  cfg.n = 32;
  const Problem pb = fivespot_problem(cfg);
  for (int v = 0; v < pb.grid.num_vertices(); ++v) {
    const Point x = pb.grid.vertex(v);
    const bool inside = x.x >= 30.0 && x.x <= 140.0 && x.y >= 170.7 && x.y <= 243.3;
    EXPECT_EQ(pb.initial_saturation(x), inside ? 0.8 : 0.0);
  }
}

TEST(FiveSpot, TimeStepRuleAndSnapshots) {
  FiveSpotConfig cfg;
  cfg.n = 64;
  const double h = 300.0 / 64;
  EXPECT_DOUBLE_EQ(fivespot_time_step_days(cfg), h * h / 240.0);
  const Problem pb = fivespot_problem(cfg);
  EXPECT_DOUBLE_EQ(pb.dt, h * h / 240.0 * 86400.0);
  EXPECT_EQ(steps_to_reach(375.0, h * h / 240.0), 4096);
  EXPECT_EQ(steps_to_reach(120.0, h * h / 240.0), 1311);
  EXPECT_EQ(steps_to_reach(0.0, 1.0), 0);
}

TEST(FiveSpot, WellsBalance) {
  FiveSpotConfig cfg;
  cfg.n = 16;
  const Problem pb = fivespot_problem(cfg);
  double total = 0.0, magnitude = 0.0;
  for (int e = 0; e < pb.grid.num_elements(); ++e) {
    const double area = pb.grid.element_rect(e).area();
    const SourceValue v = pb.source(e, 0, pb.grid.element_center(e), 0.0, 0.3);
    total += v.total * area;
    magnitude += std::abs(v.total) * area;
  }
  EXPECT_GT(magnitude, 0.0);
  EXPECT_LE(std::abs(total), 1e-10 * magnitude);
  // 30 m^2/day in SI.
  EXPECT_NEAR(0.5 * magnitude * kSecondsPerDay, 30.0, 1e-12);
}

TEST(FiveSpot, NoInjectionNoCapillarityKeepsSaturation) {
  FiveSpotConfig cfg;
  cfg.n = 16;
  cfg.inject_rate = 0.0;
  cfg.end_days = 20.0;
  Simulator sim(fivespot_problem(cfg));
  const std::vector<double> s0 = sim.state().saturation.values;
  sim.run();
  for (std::size_t v = 0; v < s0.size(); ++v) EXPECT_EQ(sim.state().saturation.values[v], s0[v]);
}

TEST(FiveSpot, MassBudgetPerStep) {
  FiveSpotConfig cfg;
  cfg.n = 16;
  cfg.end_days = 30.0;
  SimulationSettings s;
  s.pressure.kind = SolverKind::Cholesky;
  Simulator sim(fivespot_problem(cfg), s);
  sim.run();
  EXPECT_LE(sim.stats().max_mass_defect, 1e-8);
  EXPECT_GT(sim.stats().s_max, 0.8);
}

TEST(FiveSpot, FrontProxyMeans) {
  const Grid g(30, 30, Rect{0.0, 0.0, 300.0, 300.0});
  VertexScalarField s = VertexScalarField::constant(g, 0.0);
  for (int v = 0; v < g.num_vertices(); ++v) s.values[v] = fivespot_level_set(g.vertex(v)) < 0.0 ? 0.2 : 0.6;
  const FrontProxy fp = front_proxy(g, s);
  EXPECT_NEAR(fp.disk_mean, 0.2, 1e-14);
  EXPECT_NEAR(fp.annulus_mean, 0.6, 1e-14);
}

TEST(Output, VtkHeaderAndCsvRows) {
  FiveSpotConfig cfg;
  cfg.n = 4;
  cfg.end_days = 1.0;
  Simulator sim(fivespot_problem(cfg));
  sim.step();
  const VertexFields f = vertex_fields(sim);
  ASSERT_EQ(f.s.size(), 25u);
  const std::string vtk = ::testing::TempDir() + "/fs.vtk";
  const std::string csv = ::testing::TempDir() + "/fs.csv";
  write_vtk(vtk, sim.problem().grid, f, "test");
  write_fields_csv(csv, f);
  std::ifstream in(vtk);
  std::stringstream text;
  text << in.rdbuf();
  const std::string body = text.str();
  EXPECT_EQ(body.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(body.find("DATASET STRUCTURED_POINTS"), std::string::npos);
  EXPECT_NE(body.find("DIMENSIONS 5 5 1"), std::string::npos);
  EXPECT_NE(body.find("POINT_DATA 25"), std::string::npos);
  EXPECT_NE(body.find("SCALARS S float 1"), std::string::npos);
  std::ifstream cin(csv);
  std::string line;
  int lines = 0;
  std::getline(cin, line);
  EXPECT_EQ(line, "x,y,S,p,ux,uy");
  while (std::getline(cin, line)) ++lines;
  EXPECT_EQ(lines, 25);
  EXPECT_THROW(write_fields_csv("/nonexistent-dir/x.csv", f), std::exception);
}
