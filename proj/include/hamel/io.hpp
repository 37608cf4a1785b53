#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hamel/plot.hpp"
#include "hamel/systems.hpp"

namespace hamel {

struct RunConfig {
  std::string system;
  std::map<std::string, double> params;  // overrides of the system defaults
  Vector q0;
  Vector v0;
  double h = 0.1;
  double t_max = 1.0;
  IntegrationMode mode = IntegrationMode::rk4;
  std::string out_dir = "out";
  bool emit_plots = false;

  bool operator==(const RunConfig& other) const {
    return system == other.system && params == other.params && q0.size() == other.q0.size() &&
           q0 == other.q0 && v0.size() == other.v0.size() && v0 == other.v0 && h == other.h &&
           t_max == other.t_max && mode == other.mode && out_dir == other.out_dir &&
           emit_plots == other.emit_plots;
  }
};

/// Command-line values; each one set here wins over the config text.
struct ConfigOverrides {
  std::optional<std::string> system;
  std::optional<double> h;
  std::optional<double> t_max;
  std::optional<IntegrationMode> mode;
  std::optional<std::string> out_dir;
  std::optional<bool> emit_plots;
};

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

inline std::optional<Vector> parse_vector(std::string_view text) {
  std::vector<double> values;
  std::string cleaned(text);
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::string token;
  while (is >> token) {
    const auto v = parse_number(token);
    if (!v) return std::nullopt;
    values.push_back(*v);
  }
  if (values.empty()) return std::nullopt;
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

inline std::optional<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  return std::nullopt;
}

inline std::string join(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v(i));
  }
  return out;
}

}  // namespace detail

/**
 * Parses `key = value` lines ('#' starts a comment) and applies overrides.
 * Recognized keys: system, h, t_max, mode, out, plots, q0, v0 and the
 * parameter names of the selected system. Missing q0/v0/h/t_max take the
 * system's reference values.
 */
inline RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {}) {
  std::map<std::string, std::pair<std::string, int>> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = detail::trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    if (!entries.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (end == text.size()) break;
  }

  const auto fail = [](int line, const std::string& msg) -> ConfigError {
    return ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
  };

  RunConfig cfg;
  if (overrides.system) {
    cfg.system = *overrides.system;
  } else if (auto it = entries.find("system"); it != entries.end()) {
    cfg.system = it->second.first;
  }
  if (cfg.system.empty()) throw ConfigError("system name is required");
  const int system_line = entries.count("system") ? entries.at("system").second : 0;
  if (std::find(builtin_names().begin(), builtin_names().end(), cfg.system) ==
      builtin_names().end()) {
    throw fail(system_line, "unknown system '" + cfg.system + "'");
  }
  const auto defaults = make_builtin(cfg.system);
  const auto known_params = builtin_parameters(cfg.system);

  cfg.q0 = defaults.default_q0;
  cfg.v0 = defaults.default_v0;
  cfg.h = defaults.default_h;
  cfg.t_max = defaults.default_t_max;

  for (const auto& [key, entry] : entries) {
    const auto& [value, line] = entry;
    if (key == "system") continue;
    if (key == "h" || key == "t_max") {
      const auto v = detail::parse_number(value);
      if (!v) throw fail(line, "'" + key + "' expects a number, got '" + value + "'");
      (key == "h" ? cfg.h : cfg.t_max) = *v;
    } else if (key == "q0" || key == "v0") {
      const auto v = detail::parse_vector(value);
      if (!v) throw fail(line, "'" + key + "' expects a comma-separated list of numbers");
      (key == "q0" ? cfg.q0 : cfg.v0) = *v;
    } else if (key == "mode") {
      try {
        cfg.mode = parse_mode(value);
      } catch (const ConfigError& e) {
        throw fail(line, e.what());
      }
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "plots") {
      const auto v = detail::parse_bool(value);
      if (!v) throw fail(line, "'plots' expects true or false");
      cfg.emit_plots = *v;
    } else if (known_params.count(key)) {
      const auto v = detail::parse_number(value);
      if (!v) throw fail(line, "parameter '" + key + "' expects a number");
      cfg.params[key] = *v;
    } else {
      throw fail(line, "unknown key '" + key + "'");
    }
  }

  if (overrides.h) cfg.h = *overrides.h;
  if (overrides.t_max) cfg.t_max = *overrides.t_max;
  if (overrides.mode) cfg.mode = *overrides.mode;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.emit_plots) cfg.emit_plots = *overrides.emit_plots;

  if (!(cfg.h > 0.0)) throw ConfigError("h must be positive");
  if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be positive");
  if (cfg.q0.size() != defaults.system.dim()) {
    throw ConfigError("dimension mismatch: q0 has " + std::to_string(cfg.q0.size()) +
                      " components, " + cfg.system + " expects " +
                      std::to_string(defaults.system.dim()));
  }
  if (cfg.v0.size() != defaults.system.rank()) {
    throw ConfigError("dimension mismatch: v0 has " + std::to_string(cfg.v0.size()) +
                      " components, " + cfg.system + " expects " +
                      std::to_string(defaults.system.rank()));
  }
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  out += "system = " + cfg.system + "\n";
  for (const auto& [key, value] : cfg.params) out += key + " = " + format_double(value) + "\n";
  out += "q0 = " + detail::join(cfg.q0) + "\n";
  out += "v0 = " + detail::join(cfg.v0) + "\n";
  out += "h = " + format_double(cfg.h) + "\n";
  out += "t_max = " + format_double(cfg.t_max) + "\n";
  out += "mode = " + to_string(cfg.mode) + "\n";
  out += "out = " + cfg.out_dir + "\n";
  out += std::string("plots = ") + (cfg.emit_plots ? "true" : "false") + "\n";
  return out;
}

struct TrajectoryRow {
  State state;
  enum class Kind { sample, pre_impact, post_impact } kind = Kind::sample;
};

/// Grid samples with each impact inserted as a pre-jump row followed by a
/// post-jump row at t_impact, in time order.
inline std::vector<TrajectoryRow> trajectory_rows(const Trajectory& traj) {
  std::vector<TrajectoryRow> rows;
  rows.reserve(traj.samples.size() + 2 * traj.impacts.size());
  std::size_t next_impact = 0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    while (next_impact < traj.impacts.size() && traj.impacts[next_impact].next_sample <= i) {
      const auto& ev = traj.impacts[next_impact++];
      rows.push_back({State{ev.t_impact, ev.q_impact, ev.v_minus}, TrajectoryRow::Kind::pre_impact});
      rows.push_back({State{ev.t_impact, ev.q_impact, ev.v_plus}, TrajectoryRow::Kind::post_impact});
    }
    rows.push_back({traj.samples[i], TrajectoryRow::Kind::sample});
  }
  return rows;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  return os;
}

inline void finish_output(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Writes trajectory.csv and impacts.csv into `dir` (created if needed).
inline void write_trajectory(const Trajectory& traj, const MechanicalSystem& sys,
                             const InequalityConstraint& constraint,
                             const std::filesystem::path& dir) {
  if (traj.samples.empty()) throw Error("cannot write an empty trajectory");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

  const int n = sys.dim();
  const int k = sys.rank();

  const auto traj_path = dir / "trajectory.csv";
  auto os = detail::open_output(traj_path);
  os << 't';
  for (int i = 1; i <= n; ++i) os << ",q" << i;
  for (int i = 1; i <= k; ++i) os << ",v" << i;
  os << ",energy,g\n";
  for (const auto& row : trajectory_rows(traj)) {
    const State& s = row.state;
    os << format_double(s.t);
    for (int i = 0; i < n; ++i) os << ',' << format_double(s.q(i));
    for (int i = 0; i < k; ++i) os << ',' << format_double(s.v(i));
    os << ',' << format_double(energy(sys, s)) << ',' << format_double(constraint(s.q)) << '\n';
  }
  detail::finish_output(os, traj_path);

  const auto impact_path = dir / "impacts.csv";
  auto is = detail::open_output(impact_path);
  is << "t_impact";
  for (int i = 1; i <= n; ++i) is << ",q" << i;
  for (int i = 1; i <= k; ++i) is << ",v" << i << "_minus";
  for (int i = 1; i <= k; ++i) is << ",v" << i << "_plus";
  is << ",lambda0\n";
  for (const auto& ev : traj.impacts) {
    is << format_double(ev.t_impact);
    for (int i = 0; i < n; ++i) is << ',' << format_double(ev.q_impact(i));
    for (int i = 0; i < k; ++i) is << ',' << format_double(ev.v_minus(i));
    for (int i = 0; i < k; ++i) is << ',' << format_double(ev.v_plus(i));
    is << ',' << format_double(ev.lambda0) << '\n';
  }
  detail::finish_output(is, impact_path);
}

/**
 * Writes path.svg (x-y path with the boundary overlaid), v1.svg and
 * energy.svg. Returns the written paths; an empty trajectory writes nothing
 * and reports a warning on `log`.
 */
inline std::vector<std::filesystem::path> emit_plots(const Trajectory& traj,
                                                     const BuiltinSystem& builtin,
                                                     const std::filesystem::path& dir,
                                                     std::ostream& log = std::cerr) {
  if (traj.samples.empty()) {
    log << "warning: empty trajectory, no plots written\n";
    return {};
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());

  const auto rows = trajectory_rows(traj);
  svg::Series path{"trajectory", {}, "#1f77b4", 1.2};
  svg::Series v1{"v1", {}, "#d62728", 1.5};
  svg::Series en{"energy", {}, "#2ca02c", 1.5};
  double xmin = rows.front().state.q(0), xmax = xmin;
  double ymin = rows.front().state.q(1), ymax = ymin;
  for (const auto& row : rows) {
    const State& s = row.state;
    path.points.emplace_back(s.q(0), s.q(1));
    v1.points.emplace_back(s.t, s.v(0));
    en.points.emplace_back(s.t, energy(builtin.system, s));
    xmin = std::min(xmin, s.q(0));
    xmax = std::max(xmax, s.q(0));
    ymin = std::min(ymin, s.q(1));
    ymax = std::max(ymax, s.q(1));
  }
  const double pad = 0.1 * std::max({xmax - xmin, ymax - ymin, 1.0});

  svg::LinePlot path_plot;
  path_plot.title = builtin.name + ": path in the plane";
  path_plot.x_label = "x";
  path_plot.y_label = "y";
  path_plot.equal_aspect = true;
  if (builtin.boundary) {
    path_plot.series.push_back(
        {"boundary", builtin.boundary(xmin - pad, xmax + pad, ymin - pad, ymax + pad), "#444444",
         1.0});
  }
  path_plot.series.push_back(path);

  svg::LinePlot v1_plot;
  v1_plot.title = builtin.name + ": quasivelocity v1";
  v1_plot.x_label = "t";
  v1_plot.y_label = "v1";
  v1_plot.series.push_back(v1);

  svg::LinePlot energy_plot;
  energy_plot.title = builtin.name + ": energy";
  energy_plot.x_label = "t";
  energy_plot.y_label = "E";
  energy_plot.series.push_back(en);

  std::vector<std::filesystem::path> written;
  for (const auto& [name, plot] : {std::pair{"path.svg", &path_plot}, std::pair{"v1.svg", &v1_plot},
                                   std::pair{"energy.svg", &energy_plot}}) {
    const auto file = dir / name;
    auto os = detail::open_output(file);
    os << plot->render();
    detail::finish_output(os, file);
    written.push_back(file);
  }
  return written;
}

}  // namespace hamel
