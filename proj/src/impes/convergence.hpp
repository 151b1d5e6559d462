#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "impes/manufactured.hpp"
#include "impes/simulation.hpp"

namespace impes {

enum class ErrorColumn { SaturationL2, PressureL2, VelocityL2, SaturationH1, PressureH1 };
inline constexpr int kErrorColumns = 5;

struct ErrorRow {
  int n = 0;
  std::array<double, kErrorColumns> errors{};  // indexed by ErrorColumn
  double max_flux_mismatch = 0.0;
  double max_balance_error = 0.0;
  double seconds = 0.0;

  double operator[](ErrorColumn c) const { return errors[static_cast<int>(c)]; }
};

/// L2 and broken-H1 errors of the current state against the exact solution
/// at the state's time. Exact fields use the true side of the level set at
/// each quadrature point; the discrete pressure uses the side of the chord.
ErrorRow measure_errors(const ManufacturedCase& c, const Simulator& sim);

class ErrorTable {
 public:
  ErrorTable() = default;
  explicit ErrorTable(std::string case_name) : case_name_(std::move(case_name)) {}

  const std::string& case_name() const { return case_name_; }
  const std::vector<ErrorRow>& rows() const { return rows_; }
  void add(const ErrorRow& row) { rows_.push_back(row); }

  /// log(e_{i-1}/e_i) / log(h_{i-1}/h_i); empty for the first row.
  std::optional<double> order(std::size_t i, ErrorColumn c) const;
  /// Same formula between the first and the last row.
  std::optional<double> average_order(ErrorColumn c) const;

  /// Columns n, err_S_L2, ord, err_p_L2, ord, err_u_L2, ord, err_S_H1, ord,
  /// err_p_H1, ord, then an "avg" row of average orders.
  void write_csv(std::ostream& out) const;

 private:
  std::string case_name_;
  std::vector<ErrorRow> rows_;
};

struct StudyOptions {
  std::vector<int> meshes{8, 16, 32, 64, 128};
  double dt = 0.0;  // <= 0: 16 / n^2
  SimulationSettings settings = direct_solver_settings();
  std::function<void(const ErrorRow&)> on_row;

  static SimulationSettings direct_solver_settings() {
    SimulationSettings s;
    s.pressure.kind = SolverKind::Cholesky;
    return s;
  }
};

/// Runs the full simulation to the case's final time on every mesh. Meshes
/// must increase by a factor of 2.
ErrorTable convergence_study(const ManufacturedCase& c, const StudyOptions& options);

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool at_least = true;  // value >= threshold when true, value <= threshold otherwise
  bool passed = false;
};

/// Order, error-level and conservation thresholds for the tabulated cases.
std::vector<CheckResult> acceptance_checks(const ErrorTable& table);

}  // namespace impes
