#include "impes/impes.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "impes/convergence.hpp"
#include "impes/error.hpp"
#include "impes/fivespot.hpp"
#include "impes/output.hpp"

struct impes_study {
  impes::ErrorTable table;
  std::vector<impes::CheckResult> checks;
};

struct impes_fivespot {
  impes::FiveSpotConfig config;
  std::unique_ptr<impes::Simulator> sim;
  double dt_days = 0.0;
  double mass = 0.0;
  double net_injected = 0.0;
  double max_courant = 0.0;
};

namespace {

thread_local std::string last_error;

impes_status status_of(impes::ErrorCode code) {
  switch (code) {
    case impes::ErrorCode::InvalidArgument: return IMPES_ERR_INVALID_ARGUMENT;
    case impes::ErrorCode::Resolution: return IMPES_ERR_RESOLUTION;
    case impes::ErrorCode::DegenerateCut: return IMPES_ERR_DEGENERATE_CUT;
    case impes::ErrorCode::Solver: return IMPES_ERR_SOLVER;
    case impes::ErrorCode::Contract: return IMPES_ERR_CONTRACT;
    case impes::ErrorCode::Io: return IMPES_ERR_IO;
    case impes::ErrorCode::Internal: return IMPES_ERR_INTERNAL;
  }
  return IMPES_ERR_INTERNAL;
}

impes_status fail(impes_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
impes_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return IMPES_OK;
  } catch (const impes::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(IMPES_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IMPES_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(IMPES_ERR_INTERNAL, "unknown error");
  }
}

struct InvalidArgument : impes::Error {
  explicit InvalidArgument(const std::string& what)
      : impes::Error(impes::ErrorCode::InvalidArgument, what) {}
};

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

impes::SimulationSettings settings_from(const impes_run_options& o) {
  require(o.workers >= 1, "workers must be >= 1");
  require(o.pressure_tol > 0.0 && o.pressure_tol < 1.0, "pressure tolerance must be in (0, 1)");
  require(o.log_stride >= 0, "log stride must be >= 0");
  impes::SimulationSettings s;
  s.workers = o.workers;
  s.transport.workers = o.workers;
  s.transport.lumped_mass = o.lumped_mass != 0;
  s.pressure.kind = o.direct_solver ? impes::SolverKind::Cholesky : impes::SolverKind::Pcg;
  s.pressure.rel_tol = o.pressure_tol;
  if (o.log != nullptr && o.log_stride > 0) {
    const impes_log_fn fn = o.log;
    void* user = o.log_user;
    const int stride = o.log_stride;
    s.on_step = [fn, user, stride](const impes::StepLog& l) {
      if (l.level % stride != 0) return;
      char line[320];
      std::snprintf(line, sizeof line,
                    "level=%d t=%.6e cg_iter=%d residual=%.3e s_min=%.6f s_max=%.6f "
                    "courant=%.4f flux_mismatch=%.3e balance=%.3e",
                    l.level, l.time, l.pressure_iterations, l.pressure_residual,
                    l.transport.s_min, l.transport.s_max, l.transport.courant, l.flux_mismatch,
                    l.balance_error);
      fn(line, user);
    };
  }
  return s;
}

impes_run_options defaults_if_null(const impes_run_options* o) {
  impes_run_options d;
  impes_run_options_init(&d);
  return o != nullptr ? *o : d;
}

}  // namespace

extern "C" {

const char* impes_last_error(void) { return last_error.c_str(); }

const char* impes_version(void) { return "1.0.0"; }

void impes_run_options_init(impes_run_options* o) {
  if (o == nullptr) return;
  *o = impes_run_options{};
  o->workers = 1;
  o->pressure_tol = 1e-10;
  o->direct_solver = 0;
  o->lumped_mass = 0;
  o->dt = 0.0;
  o->final_time = 0.0;
  o->log_stride = 0;
  o->log = nullptr;
  o->log_user = nullptr;
}

impes_status impes_study_run(const char* case_id, const int* meshes, size_t count,
                             const impes_run_options* options, impes_study** out) {
  if (out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  return guarded([&] {
    require(case_id != nullptr, "null case id");
    require(meshes != nullptr && count > 0, "no meshes given");
    const impes_run_options o = defaults_if_null(options);
    impes::ManufacturedCase c = impes::make_case(case_id);
    require(o.dt >= 0.0 && o.final_time >= 0.0, "time step and final time must be >= 0");
    if (o.final_time > 0.0) c.final_time = o.final_time;
    impes::StudyOptions so;
    so.meshes.assign(meshes, meshes + count);
    so.dt = o.dt;
    so.settings = settings_from(o);
    auto study = std::make_unique<impes_study>();
    study->table = impes::convergence_study(c, so);
    study->checks = impes::acceptance_checks(study->table);
    *out = study.release();
  });
}

size_t impes_study_rows(const impes_study* study) {
  return study == nullptr ? 0 : study->table.rows().size();
}

impes_status impes_study_row(const impes_study* study, size_t index, impes_error_row* out) {
  if (study == nullptr || out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= study->table.rows().size()) return fail(IMPES_ERR_INVALID_ARGUMENT, "row out of range");
  const impes::ErrorRow& r = study->table.rows()[index];
  out->n = r.n;
  for (int c = 0; c < impes::kErrorColumns; ++c) {
    out->errors[c] = r.errors[c];
    const auto ord = study->table.order(index, static_cast<impes::ErrorColumn>(c));
    out->orders[c] = ord ? *ord : std::numeric_limits<double>::quiet_NaN();
  }
  out->max_flux_mismatch = r.max_flux_mismatch;
  out->max_balance_error = r.max_balance_error;
  out->seconds = r.seconds;
  return IMPES_OK;
}

impes_status impes_study_average_order(const impes_study* study, impes_column column,
                                       double* out) {
  if (study == nullptr || out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  if (column < IMPES_COL_S_L2 || column > IMPES_COL_P_H1) {
    return fail(IMPES_ERR_INVALID_ARGUMENT, "unknown error column");
  }
  const auto ord = study->table.average_order(static_cast<impes::ErrorColumn>(column));
  if (!ord) return fail(IMPES_ERR_INVALID_ARGUMENT, "average order needs at least two meshes");
  *out = *ord;
  return IMPES_OK;
}

impes_status impes_study_write_csv(const impes_study* study, const char* path) {
  if (study == nullptr || path == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream f(path);
    if (!f) throw impes::Error(impes::ErrorCode::Io, std::string("cannot open ") + path);
    study->table.write_csv(f);
    f.flush();
    if (!f) throw impes::Error(impes::ErrorCode::Io, std::string("write failed: ") + path);
  });
}

size_t impes_study_checks(const impes_study* study) {
  return study == nullptr ? 0 : study->checks.size();
}

impes_status impes_study_check(const impes_study* study, size_t index, impes_check* out) {
  if (study == nullptr || out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= study->checks.size()) return fail(IMPES_ERR_INVALID_ARGUMENT, "check out of range");
  const impes::CheckResult& c = study->checks[index];
  std::memset(out->name, 0, sizeof out->name);
  std::strncpy(out->name, c.name.c_str(), sizeof out->name - 1);
  out->value = c.value;
  out->threshold = c.threshold;
  out->at_least = c.at_least ? 1 : 0;
  out->passed = c.passed ? 1 : 0;
  return IMPES_OK;
}

void impes_study_free(impes_study* study) { delete study; }

void impes_fivespot_options_init(impes_fivespot_options* o) {
  if (o == nullptr) return;
  const impes::FiveSpotConfig d;
  o->n = d.n;
  o->inject_rate = d.inject_rate;
  o->end_days = d.end_days;
  o->dt_days = d.dt_days;
  o->entry_pressure = d.entry_pressure;
}

impes_status impes_fivespot_create(const impes_fivespot_options* options,
                                   const impes_run_options* run, impes_fivespot** out) {
  if (out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null output handle");
  *out = nullptr;
  return guarded([&] {
    require(options != nullptr, "null five-spot options");
    auto fs = std::make_unique<impes_fivespot>();
    fs->config.n = options->n;
    fs->config.inject_rate = options->inject_rate;
    fs->config.end_days = options->end_days;
    fs->config.dt_days = options->dt_days;
    fs->config.entry_pressure = options->entry_pressure;
    require(options->entry_pressure >= 0.0, "entry pressure must be >= 0");
    impes::Problem pb = impes::fivespot_problem(fs->config);
    fs->dt_days = impes::fivespot_time_step_days(fs->config);

    impes::SimulationSettings s = settings_from(defaults_if_null(run));
    impes_fivespot* raw = fs.get();
    auto user_log = std::move(s.on_step);
    s.on_step = [raw, user_log](const impes::StepLog& l) {
      raw->mass = l.transport.mass_after;
      raw->net_injected += l.transport.net_source;
      raw->max_courant = std::max(raw->max_courant, l.transport.courant);
      if (user_log) user_log(l);
    };
    double mass = 0.0;
    const impes::Grid& g = pb.grid;
    for (int v = 0; v < g.num_vertices(); ++v) {
      const auto [i, j] = g.vertex_ij(v);
      const double wx = (i == 0 || i == g.nx()) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == g.ny()) ? 0.5 : 1.0;
      mass += wx * wy * g.hx() * g.hy() * pb.initial_saturation(g.vertex(v));
    }
    fs->mass = pb.fluid.porosity * mass;
    fs->sim = std::make_unique<impes::Simulator>(std::move(pb), std::move(s));
    *out = fs.release();
  });
}

double impes_fivespot_time_step_days(const impes_fivespot* sim) {
  return sim == nullptr ? 0.0 : sim->dt_days;
}

impes_status impes_fivespot_advance_to(impes_fivespot* sim, double days) {
  if (sim == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null handle");
  if (!(days >= 0.0)) return fail(IMPES_ERR_INVALID_ARGUMENT, "target time must be >= 0");
  return guarded([&] {
    const int total = sim->sim->problem().steps;
    const int target = std::min(total, impes::steps_to_reach(days, sim->dt_days));
    const int level = sim->sim->state().level;
    if (target > level) sim->sim->advance(target - level);
  });
}

impes_status impes_fivespot_stats_get(const impes_fivespot* sim, impes_fivespot_stats* out) {
  if (sim == nullptr || out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const impes::SimulationState& st = sim->sim->state();
    const impes::RunStats& rs = sim->sim->stats();
    const auto& s = st.saturation.values;
    out->level = st.level;
    out->days = st.level * sim->dt_days;
    out->s_min = *std::min_element(s.begin(), s.end());
    out->s_max = *std::max_element(s.begin(), s.end());
    out->run_s_min = st.level > 0 ? std::min(rs.s_min, out->s_min) : out->s_min;
    out->run_s_max = st.level > 0 ? std::max(rs.s_max, out->s_max) : out->s_max;
    out->mass = sim->mass;
    out->net_injected = sim->net_injected;
    out->max_mass_defect = rs.max_mass_defect;
    const impes::FrontProxy fp = impes::front_proxy(sim->sim->problem().grid, st.saturation);
    out->disk_mean = fp.disk_mean;
    out->annulus_mean = fp.annulus_mean;
    out->max_courant = sim->max_courant;
  });
}

impes_status impes_fivespot_saturation(const impes_fivespot* sim, double* out, size_t len) {
  if (sim == nullptr || out == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  const auto& s = sim->sim->state().saturation.values;
  if (len < s.size()) return fail(IMPES_ERR_INVALID_ARGUMENT, "output buffer too small");
  std::copy(s.begin(), s.end(), out);
  return IMPES_OK;
}

impes_status impes_fivespot_write_vtk(const impes_fivespot* sim, const char* path) {
  if (sim == nullptr || path == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    char title[96];
    std::snprintf(title, sizeof title, "five-spot t=%.3f day",
                  sim->sim->state().level * sim->dt_days);
    impes::write_vtk(path, sim->sim->problem().grid, impes::vertex_fields(*sim->sim), title);
  });
}

impes_status impes_fivespot_write_csv(const impes_fivespot* sim, const char* path) {
  if (sim == nullptr || path == nullptr) return fail(IMPES_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { impes::write_fields_csv(path, impes::vertex_fields(*sim->sim)); });
}

void impes_fivespot_free(impes_fivespot* sim) { delete sim; }

}  // extern "C"
