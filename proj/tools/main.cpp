#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "impes/impes.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void log_line(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int runtime_error(const char* what, impes_status s) {
  std::fprintf(stderr, "error: %s failed (status %d): %s\n", what, static_cast<int>(s),
               impes_last_error());
  return kExitFailure;
}

impes_run_options run_options(const impes_cli::Config& c, bool direct_default) {
  impes_run_options o;
  impes_run_options_init(&o);
  o.workers = c.workers;
  o.pressure_tol = c.tol;
  o.direct_solver = c.solver.empty() ? direct_default : c.solver == "cholesky";
  o.lumped_mass = c.lumped_mass;
  o.log_stride = c.stride;
  o.log = c.stride > 0 ? log_line : nullptr;
  return o;
}

std::string time_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

int run_convergence(const impes_cli::Config& c) {
  impes_run_options o = run_options(c, true);
  o.dt = c.dt;
  o.final_time = c.T;
  impes_study* study = nullptr;
  impes_status s = impes_study_run(c.case_id.c_str(), c.meshes.data(), c.meshes.size(), &o, &study);
  if (s != IMPES_OK) return runtime_error("convergence study", s);

  std::printf("%-5s %12s %7s %12s %7s %12s %7s %12s %7s %12s %7s\n", "n", "S_L2", "ord", "p_L2",
              "ord", "u_L2", "ord", "S_H1", "ord", "p_H1", "ord");
  for (std::size_t i = 0; i < impes_study_rows(study); ++i) {
    impes_error_row r;
    impes_study_row(study, i, &r);
    std::printf("%-5d", r.n);
    for (int k = 0; k < 5; ++k) {
      if (std::isnan(r.orders[k])) {
        std::printf(" %12.4e %7s", r.errors[k], "-");
      } else {
        std::printf(" %12.4e %7.3f", r.errors[k], r.orders[k]);
      }
    }
    std::printf("\n");
  }
  if (impes_study_rows(study) > 1) {
    std::printf("%-5s", "avg");
    for (int k = 0; k < 5; ++k) {
      double ord = 0.0;
      impes_study_average_order(study, static_cast<impes_column>(k), &ord);
      std::printf(" %12s %7.3f", "", ord);
    }
    std::printf("\n");
  }

  const std::string path = (std::filesystem::path(c.out) / ("errors_" + c.case_id + ".csv")).string();
  s = impes_study_write_csv(study, path.c_str());
  if (s != IMPES_OK) {
    impes_study_free(study);
    return runtime_error("writing the error table", s);
  }
  std::printf("wrote %s\n", path.c_str());

  int code = kExitOk;
  if (c.check) {
    for (std::size_t i = 0; i < impes_study_checks(study); ++i) {
      impes_check k;
      impes_study_check(study, i, &k);
      std::printf("[%s] %s: %.4g %s %.4g\n", k.passed ? "PASS" : "FAIL", k.name, k.value,
                  k.at_least ? ">=" : "<=", k.threshold);
      if (!k.passed) code = kExitFailure;
    }
  }
  impes_study_free(study);
  return code;
}

int run_fivespot(const impes_cli::Config& c) {
  impes_fivespot_options fo;
  impes_fivespot_options_init(&fo);
  fo.n = c.n;
  fo.inject_rate = c.inject_rate;
  fo.entry_pressure = c.entry_pressure;
  if (c.dt > 0.0) fo.dt_days = c.dt;
  if (c.T > 0.0) fo.end_days = c.T;
  const impes_run_options o = run_options(c, true);

  impes_fivespot* sim = nullptr;
  impes_status s = impes_fivespot_create(&fo, &o, &sim);
  if (s != IMPES_OK) return runtime_error("five-spot setup", s);
  std::printf("five-spot n=%d dt=%.6g day end=%g day inject=%g m^2/day\n", fo.n,
              impes_fivespot_time_step_days(sim), fo.end_days, fo.inject_rate);

  int code = kExitOk;
  for (double t : c.outputs) {
    if (t > fo.end_days) {
      std::fprintf(stderr, "warning: output time %g day is past the end time, skipped\n", t);
      continue;
    }
    s = impes_fivespot_advance_to(sim, t);
    if (s != IMPES_OK) {
      code = runtime_error("time stepping", s);
      break;
    }
    impes_fivespot_stats st;
    impes_fivespot_stats_get(sim, &st);
    std::printf("t=%.4f day level=%d S=[%.6f, %.6f] mass=%.6e injected=%.6e "
                "max_mass_defect=%.3e disk_mean=%.4f annulus_mean=%.4f\n",
                st.days, st.level, st.s_min, st.s_max, st.mass, st.net_injected,
                st.max_mass_defect, st.disk_mean, st.annulus_mean);
    if (st.s_min < 0.0 || st.s_max > 1.0) {
      std::fprintf(stderr, "warning: saturation outside [0, 1] at t=%g day\n", st.days);
    }
    const std::filesystem::path dir(c.out);
    const std::string label = time_label(t);
    if (c.vtk) {
      const std::string vtk = (dir / ("sat_" + label + ".vtk")).string();
      s = impes_fivespot_write_vtk(sim, vtk.c_str());
      if (s != IMPES_OK) {
        code = runtime_error("writing VTK output", s);
        break;
      }
    }
    const std::string csv = (dir / ("fields_" + label + ".csv")).string();
    s = impes_fivespot_write_csv(sim, csv.c_str());
    if (s != IMPES_OK) {
      code = runtime_error("writing CSV output", s);
      break;
    }
  }
  impes_fivespot_free(sim);
  return code;
}

void add_common(CLI::App* cmd, impes_cli::Config& c) {
  cmd->add_option("--dt", c.dt, "time step (convergence: model time, fivespot: days; 0 = default rule)");
  cmd->add_option("--T", c.T, "final time (0 = case default)");
  cmd->add_option("--tol", c.tol, "relative residual tolerance of the pressure solver");
  cmd->add_option("--solver", c.solver, "pressure solver: pcg or cholesky");
  cmd->add_option("--workers", c.workers, "threads for assembly and flux stages");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--stride", c.stride, "log every k-th time step to stderr (0 = off)");
  cmd->add_flag("--lumped-mass", c.lumped_mass, "lump the dual mass matrix");
}

}  // namespace

int main(int argc, char** argv) {
  // A config file supplies defaults; command-line flags override it.
  impes_cli::Config config;
  {
    CLI::App pre;
    pre.allow_extras();
    pre.set_help_flag();
    std::string path;
    pre.add_option("--config", path);
    try {
      pre.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kExitUsage;
    }
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) {
        std::fprintf(stderr, "error: cannot read config file %s\n", path.c_str());
        return kExitUsage;
      }
      std::stringstream text;
      text << in.rdbuf();
      try {
        config = impes_cli::parse(text.str());
      } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
      }
    }
  }

  CLI::App app{"Two-phase IMPES flow simulator"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value file with default settings");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the effective configuration and exit");

  CLI::App* conv = app.add_subcommand("convergence", "mesh-refinement study on a manufactured case");
  conv->add_option("--case", config.case_id, "ex1, ex2, ex3a or ex3b");
  conv->add_option("--meshes", config.meshes, "comma-separated mesh sizes, doubling")->delimiter(',');
  conv->add_flag("--check", config.check, "exit 1 unless the order and error thresholds pass");
  add_common(conv, config);

  CLI::App* five = app.add_subcommand("fivespot", "quarter five-spot waterflood");
  five->add_option("--n", config.n, "elements per side");
  five->add_option("--inject-rate", config.inject_rate, "injection rate in m^2/day");
  five->add_option("--entry-pressure", config.entry_pressure, "capillary entry pressure in Pa");
  five->add_option("--outputs", config.outputs, "snapshot times in days")->delimiter(',');
  five->add_flag("--vtk,!--no-vtk", config.vtk, "write VTK snapshots");
  add_common(five, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const bool convergence = conv->parsed();
  config.subcommand = convergence ? "convergence" : "fivespot";
  if (const std::string problem = impes_cli::validate(config); !problem.empty()) {
    std::fprintf(stderr, "error: %s\n", problem.c_str());
    return kExitUsage;
  }
  if (print_config) {
    std::fputs(impes_cli::serialize(config).c_str(), stdout);
    return kExitOk;
  }
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create %s: %s\n", config.out.c_str(), ec.message().c_str());
    return kExitFailure;
  }
  return convergence ? run_convergence(config) : run_fivespot(config);
}
