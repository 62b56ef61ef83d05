#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sbpnls/errors.hpp"
#include "sbpnls/experiments.hpp"
#include "sbpnls/tableau.hpp"

namespace sbpnls {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, const std::string& key, int line) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw ConfigError(key + ": expected a number, got '" + text + "'", line);
  return v;
}

long parse_integer(const std::string& text, const std::string& key, int line) {
  long v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw ConfigError(key + ": expected an integer, got '" + text + "'", line);
  return v;
}

bool parse_bool(const std::string& text, const std::string& key, int line) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'", line);
}

std::vector<double> parse_list(const std::string& text, const std::string& key, int line) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(trim(item), key, line));
  return out;
}

void require(bool ok, const std::string& msg, int line) {
  if (!ok) throw ConfigError(msg, line);
}

using Handler = std::function<void(RunConfig&, const std::string& value, const std::string& key,
                                   int line)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"label", [](RunConfig& c, const std::string& v, auto&, int) { c.label = v; }},
      {"problem",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         auto names = problem_names();
         require(std::find(names.begin(), names.end(), v) != names.end(),
                 k + ": unknown problem '" + v + "'", line);
         c.problem = v;
       }},
      {"equation",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         if (v == "nls")
           c.equation = Equation::nls;
         else if (v == "nls_hyperbolic")
           c.equation = Equation::nls_hyperbolic;
         else
           throw ConfigError(k + ": expected nls or nls_hyperbolic, got '" + v + "'", line);
       }},
      {"operator.kind",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         try {
           c.operator_kind = operator_kind_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError(k + ": " + e.what(), line);
         }
       }},
      {"operator.order",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.operator_order = static_cast<int>(parse_integer(v, k, line));
       }},
      {"operator.n",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         long n = parse_integer(v, k, line);
         require(n >= 3, k + ": need at least 3 nodes", line);
         c.n = static_cast<std::size_t>(n);
       }},
      {"domain.x_left",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.x_left = parse_real(v, k, line);
       }},
      {"domain.x_right",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.x_right = parse_real(v, k, line);
       }},
      {"tableau",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         try {
           (void)tableau_by_name(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError(k + ": " + e.what(), line);
         }
         c.tableau = v;
       }},
      {"dt",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.dt = parse_real(v, k, line);
         require(c.dt > 0.0, k + ": must be positive", line);
       }},
      {"t_end",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.t_end = parse_real(v, k, line);
         require(c.t_end > 0.0, k + ": must be positive", line);
       }},
      {"tau",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.tau = parse_real(v, k, line);
         require(*c.tau > 0.0, k + ": must be positive", line);
       }},
      {"beta_override",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.beta_override = parse_real(v, k, line);
       }},
      {"relaxation.mode",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         try {
           c.relaxation.mode = relaxation_mode_from_string(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError(k + ": " + e.what(), line);
         }
       }},
      {"relaxation.gamma_tol",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.relaxation.gamma_tol = parse_real(v, k, line);
       }},
      {"relaxation.gamma_bracket",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.relaxation.gamma_bracket = parse_real(v, k, line);
       }},
      {"relaxation.max_expansions",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.relaxation.max_expansions = static_cast<int>(parse_integer(v, k, line));
       }},
      {"relaxation.max_iterations",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.relaxation.max_iterations = static_cast<int>(parse_integer(v, k, line));
       }},
      {"output", [](RunConfig& c, const std::string& v, auto&, int) { c.output = v; }},
      {"snapshot_times",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.snapshot_times = parse_list(v, k, line);
       }},
      {"record_every",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         long n = parse_integer(v, k, line);
         require(n >= 1, k + ": must be at least 1", line);
         c.record_every = static_cast<std::size_t>(n);
       }},
      {"record_naive_energy",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.record_naive_energy = parse_bool(v, k, line);
       }},
      {"sweep.axis",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         if (v == "space")
           c.sweep_axis = SweepAxis::space;
         else if (v == "time")
           c.sweep_axis = SweepAxis::time;
         else if (v == "tau")
           c.sweep_axis = SweepAxis::tau;
         else
           throw ConfigError(k + ": expected space, time or tau, got '" + v + "'", line);
       }},
      {"sweep.values",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.sweep_values = parse_list(v, k, line);
       }},
      {"reference.dt",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.reference_dt = parse_real(v, k, line);
         require(*c.reference_dt > 0.0, k + ": must be positive", line);
       }},
      {"growth.sample_times",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.sample_times = parse_list(v, k, line);
       }},
      {"growth.t_floor",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         c.growth_t_floor = parse_real(v, k, line);
       }},
      {"bench.repeats",
       [](RunConfig& c, const std::string& v, auto& k, int line) {
         long n = parse_integer(v, k, line);
         require(n >= 1, k + ": must be at least 1", line);
         c.bench_repeats = static_cast<int>(n);
       }},
  };
  return table;
}

}  // namespace

std::string to_string(Equation e) { return e == Equation::nls ? "nls" : "nls_hyperbolic"; }

std::string to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::space: return "space";
    case SweepAxis::time: return "time";
    case SweepAxis::tau: return "tau";
  }
  return "?";
}

void RunConfig::validate() const {
  auto names = problem_names();
  if (std::find(names.begin(), names.end(), problem) == names.end())
    throw ConfigError("problem: unknown problem '" + problem + "'");
  try {
    (void)tableau_by_name(tableau);
    relaxation.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("dt and t_end must be positive");
  if (equation == Equation::nls_hyperbolic) {
    if (!tau) throw ConfigError("tau is required for equation = nls_hyperbolic");
    if (operator_kind != OperatorKind::upwind_fd)
      throw ConfigError("equation = nls_hyperbolic needs operator.kind = upwind_fd");
  } else if (tau) {
    throw ConfigError("tau is only meaningful for equation = nls_hyperbolic");
  }
  if (x_left.has_value() != x_right.has_value())
    throw ConfigError("domain.x_left and domain.x_right must be given together");
  if (x_left && !(*x_left < *x_right)) throw ConfigError("domain.x_left must be below x_right");
  for (double t : snapshot_times)
    if (!(t > 0.0) || t > t_end) throw ConfigError("snapshot_times must lie in (0, t_end]");
  for (double t : sample_times)
    if (!(t > 0.0) || t > t_end) throw ConfigError("growth.sample_times must lie in (0, t_end]");
  for (double v : sweep_values)
    if (!(v > 0.0)) throw ConfigError("sweep.values must be positive");
}

RunConfig parse_config(std::istream& in) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::string text = trim(raw);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + text + "'", line);
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    auto it = handlers().find(key);
    if (it == handlers().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (auto [pos, fresh] = seen.emplace(key, line); !fresh)
      throw ConfigError("duplicate key '" + key + "' (first set on line " +
                            std::to_string(pos->second) + ")",
                        line);
    it->second(c, value, key, line);
  }
  c.validate();
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    RunConfig c = parse_config(in);
    if (c.label.empty()) c.label = path.stem().string();
    return c;
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace sbpnls
