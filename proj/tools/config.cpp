#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

namespace impes_cli {

namespace {

// CLI11 splits unquoted values at whitespace.
std::string quoted(const std::string& s) {
  if (s.find('"') != std::string::npos) throw std::invalid_argument("value must not contain '\"'");
  return '"' + s + '"';
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>) {
      out += format_double(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

template <class T>
T number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("bad value for " + key + ": " + text);
  return value;
}

template <class T>
std::vector<T> list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(number<T>(key, item));
  return out;
}

bool flag(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw std::invalid_argument("bad value for " + key + ": " + text);
}

}  // namespace

std::string validate(const Config& c) {
  if (c.subcommand != "convergence" && c.subcommand != "fivespot") return "unknown subcommand";
  if (c.subcommand == "convergence") {
    if (c.case_id != "ex1" && c.case_id != "ex2" && c.case_id != "ex3a" && c.case_id != "ex3b") {
      return "unknown case '" + c.case_id + "' (expected ex1, ex2, ex3a or ex3b)";
    }
    if (c.meshes.empty()) return "--meshes must list at least one mesh size";
    for (std::size_t i = 0; i < c.meshes.size(); ++i) {
      if (c.meshes[i] < 2) return "mesh sizes must be >= 2";
      if (i > 0 && c.meshes[i] != 2 * c.meshes[i - 1]) return "mesh sizes must double each time";
    }
  } else {
    if (c.n < 2) return "--n must be >= 2";
    if (!(c.inject_rate >= 0.0)) return "--inject-rate must be >= 0";
    if (!(c.entry_pressure >= 0.0)) return "entry pressure must be >= 0";
    for (double t : c.outputs) {
      if (!(t >= 0.0)) return "output times must be >= 0";
    }
  }
  if (!(c.dt >= 0.0)) return "--dt must be >= 0";
  if (!(c.T >= 0.0)) return "--T must be >= 0";
  if (!(c.tol > 0.0 && c.tol < 1.0)) return "--tol must be in (0, 1)";
  if (!c.solver.empty() && c.solver != "pcg" && c.solver != "cholesky") {
    return "--solver must be pcg or cholesky";
  }
  if (c.workers < 1) return "--workers must be >= 1";
  if (c.stride < 0) return "--stride must be >= 0";
  if (c.out.empty()) return "--out must not be empty";
  return {};
}

std::string serialize(const Config& c) {
  std::ostringstream o;
  o << "subcommand=" << c.subcommand << '\n'
    << "case=" << c.case_id << '\n'
    << "meshes=" << join(c.meshes) << '\n'
    << "check=" << (c.check ? "true" : "false") << '\n'
    << "n=" << c.n << '\n'
    << "inject_rate=" << format_double(c.inject_rate) << '\n'
    << "entry_pressure=" << format_double(c.entry_pressure) << '\n'
    << "outputs=" << join(c.outputs) << '\n'
    << "vtk=" << (c.vtk ? "true" : "false") << '\n'
    << "dt=" << format_double(c.dt) << '\n'
    << "T=" << format_double(c.T) << '\n'
    << "tol=" << format_double(c.tol) << '\n'
    << "solver=" << c.solver << '\n'
    << "workers=" << c.workers << '\n'
    << "out=" << quoted(c.out) << '\n'
    << "stride=" << c.stride << '\n'
    << "lumped_mass=" << (c.lumped_mass ? "true" : "false") << '\n';
  return o.str();
}

Config parse(const std::string& text) {
  std::istringstream in(text);
  const std::vector<CLI::ConfigItem> items = CLI::ConfigINI().from_config(in);
  Config c;
  for (const CLI::ConfigItem& item : items) {
    const std::string key = item.fullname();
    if (key == "++" || key == "--") continue;  // section markers
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
    if (key == "subcommand") c.subcommand = value;
    else if (key == "case") c.case_id = value;
    else if (key == "meshes") c.meshes = list<int>(key, value);
    else if (key == "check") c.check = flag(key, value);
    else if (key == "n") c.n = number<int>(key, value);
    else if (key == "inject_rate") c.inject_rate = number<double>(key, value);
    else if (key == "entry_pressure") c.entry_pressure = number<double>(key, value);
    else if (key == "outputs") c.outputs = list<double>(key, value);
    else if (key == "vtk") c.vtk = flag(key, value);
    else if (key == "dt") c.dt = number<double>(key, value);
    else if (key == "T") c.T = number<double>(key, value);
    else if (key == "tol") c.tol = number<double>(key, value);
    else if (key == "solver") c.solver = value;
    else if (key == "workers") c.workers = number<int>(key, value);
    else if (key == "out") c.out = value;
    else if (key == "stride") c.stride = number<int>(key, value);
    else if (key == "lumped_mass") c.lumped_mass = flag(key, value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return c;
}

}  // namespace impes_cli
