#pragma once

#include <string>
#include <vector>

namespace impes_cli {

struct Config {
  std::string subcommand;  // "convergence" or "fivespot"

  // convergence
  std::string case_id = "ex1";
  std::vector<int> meshes{8, 16, 32, 64, 128};
  bool check = false;

  // fivespot
  int n = 64;
  double inject_rate = 30.0;      // m^2/day
  double entry_pressure = 0.0;    // Pa
  std::vector<double> outputs{0.0, 120.0, 240.0, 375.0};  // days
  bool vtk = true;

  double dt = 0.0;  // <= 0: default rule (16/n^2, or h^2/240 day)
  double T = 0.0;   // <= 0: case default (1, or 375 day)
  double tol = 1e-10;
  std::string solver;  // "", "pcg" or "cholesky"; empty picks per subcommand
  int workers = 1;
  std::string out = ".";
  int stride = 0;  // log every k-th step, 0: only at outputs
  bool lumped_mass = false;

  bool operator==(const Config&) const = default;
};

/// Checks ranges and consistency; returns an empty string when valid.
std::string validate(const Config& c);

/// Flat key=value text, one key per line.
std::string serialize(const Config& c);

/// Inverse of serialize; unknown keys or malformed values throw
/// std::invalid_argument.
Config parse(const std::string& text);

}  // namespace impes_cli
