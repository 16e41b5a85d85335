#pragma once

// Model files (YAML) and built-in presets.
//
//   name: torus-example
//   constants: {k: 0.3}
//   chart:
//     axes:
//       - {name: x, min: 0, max: 2*pi, periodic: true}
//       - {name: y, min: 0, max: 2*pi, periodic: true}
//   metric:                      # missing components are zero
//     "x,x": 1 + k*sin(y)
//     "y,y": 1
//   scalar: {f: sin(x)*cos(y)}
//   perturbation: {s: {"x,y": cos(x)}, h: sin(y)}
//   grid: [64, 64]
//   points: [[0.1, 0.2]]

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "beric/chart.hpp"
#include "beric/cosmology.hpp"
#include "beric/error.hpp"
#include "beric/expr.hpp"
#include "beric/model.hpp"
#include "beric/random_model.hpp"

namespace beric {

namespace detail {

inline std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] inline void bad(const YAML::Node& n, const std::string& what) {
  throw config_error(what + where(n));
}

inline void allow_keys(const YAML::Node& map, std::initializer_list<std::string_view> keys,
                       const std::string& ctx) {
  if (!map.IsMap()) bad(map, ctx + " must be a mapping");
  std::set<std::string> seen;
  for (const auto& kv : map) {
    std::string k = kv.first.as<std::string>();
    if (!seen.insert(k).second) bad(kv.first, "duplicate key '" + k + "' in " + ctx);
    bool ok = false;
    for (auto a : keys) ok = ok || a == k;
    if (!ok) bad(kv.first, "unknown key '" + k + "' in " + ctx);
  }
}

inline std::string scalar_text(const YAML::Node& n, const std::string& ctx) {
  if (!n.IsScalar()) bad(n, ctx + " must be a scalar");
  return n.Scalar();
}

inline expr parse_at(const YAML::Node& n, std::span<const std::string> coords, const constant_table& consts,
                     const std::string& ctx) {
  std::string text = scalar_text(n, ctx);
  try {
    return parse(text, coords, consts);
  } catch (const parse_error& e) {
    bad(n, ctx + ": " + e.what());
  }
}

inline double number_at(const YAML::Node& n, const constant_table& consts, const std::string& ctx) {
  expr e = parse_at(n, {}, consts, ctx);
  if (!is_closed(e)) bad(n, ctx + " must be constant");
  return evaluate(e, {});
}

/// Components keyed "a,b" by coordinate name. Missing ones stay zero.
inline void read_components(const YAML::Node& map, const chart& c, const constant_table& consts,
                            sym_tensor_field& out, const std::string& ctx) {
  if (!map.IsMap()) bad(map, ctx + " must be a mapping of \"a,b\" keys");
  std::set<std::pair<int, int>> seen;
  for (const auto& kv : map) {
    std::string key = kv.first.as<std::string>();
    auto comma = key.find(',');
    if (comma == std::string::npos) bad(kv.first, ctx + " key '" + key + "' must be \"a,b\"");
    auto trim = [](std::string s) {
      while (!s.empty() && s.front() == ' ') s.erase(s.begin());
      while (!s.empty() && s.back() == ' ') s.pop_back();
      return s;
    };
    int i = c.index_of(trim(key.substr(0, comma)));
    int j = c.index_of(trim(key.substr(comma + 1)));
    if (i < 0 || j < 0) bad(kv.first, ctx + " key '" + key + "' names an unknown coordinate");
    if (i > j) std::swap(i, j);
    if (!seen.insert({i, j}).second) bad(kv.first, ctx + " component '" + key + "' given twice");
    out(i, j) = parse_at(kv.second, c.names(), consts, ctx + "[" + key + "]");
  }
}

}  // namespace detail

inline model load_model(const std::string& text, const std::string& source = "<string>") {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw config_error(source + ": " + e.what());
  }
  try {
    allow_keys(root, {"name", "constants", "chart", "metric", "scalar", "perturbation", "grid", "points"},
               "model");
    model m;
    m.name = root["name"] ? scalar_text(root["name"], "name") : source;

    if (const YAML::Node cs = root["constants"]) {
      if (!cs.IsMap()) bad(cs, "constants must be a mapping");
      constant_table table;
      for (const auto& kv : cs) {
        std::string k = kv.first.as<std::string>();
        if (table.count(k)) bad(kv.first, "duplicate constant '" + k + "'");
        table[k] = number_at(kv.second, table, "constant " + k);
      }
      m.constants = std::move(table);
    }

    const YAML::Node ch = root["chart"];
    if (!ch) bad(root, "model needs a chart");
    allow_keys(ch, {"dim", "axes"}, "chart");
    const YAML::Node ax = ch["axes"];
    if (!ax || !ax.IsSequence()) bad(ch, "chart needs an axes list");
    std::vector<axis> axes;
    for (const auto& a : ax) {
      allow_keys(a, {"name", "min", "max", "periodic"}, "axis");
      if (!a["name"] || !a["min"] || !a["max"]) bad(a, "axis needs name, min and max");
      axis x;
      x.name = scalar_text(a["name"], "axis name");
      x.lo = number_at(a["min"], m.constants, "axis min");
      x.hi = number_at(a["max"], m.constants, "axis max");
      x.periodic = a["periodic"] ? a["periodic"].as<bool>() : false;
      axes.push_back(std::move(x));
    }
    if (ch["dim"] && ch["dim"].as<int>() != static_cast<int>(axes.size()))
      bad(ch["dim"], "chart dim does not match the number of axes");
    try {
      m.domain = chart(std::move(axes));
    } catch (const error& e) {
      bad(ch, e.what());
    }
    const chart& c = m.domain;

    m.metric = metric_field(c);
    if (!root["metric"]) bad(root, "model needs a metric");
    read_components(root["metric"], c, m.constants, m.metric, "metric");

    m.potential = {c, constant(0)};
    if (const YAML::Node sc = root["scalar"]) {
      allow_keys(sc, {"f"}, "scalar");
      if (sc["f"]) m.potential.value = parse_at(sc["f"], c.names(), m.constants, "scalar f");
    }

    if (const YAML::Node pt = root["perturbation"]) {
      allow_keys(pt, {"s", "h"}, "perturbation");
      sym_tensor_field s(c);
      if (pt["s"]) read_components(pt["s"], c, m.constants, s, "perturbation s");
      m.perturbation = std::move(s);
      m.direction = scalar_field{c, pt["h"] ? parse_at(pt["h"], c.names(), m.constants, "perturbation h")
                                            : constant(0)};
    }

    if (const YAML::Node gr = root["grid"]) {
      if (!gr.IsSequence() || gr.size() != static_cast<std::size_t>(c.dim()))
        bad(gr, "grid needs one node count per axis");
      std::vector<int> counts;
      for (const auto& v : gr) {
        int k = v.as<int>();
        if (k < 1) bad(v, "grid node counts must be positive");
        counts.push_back(k);
      }
      m.grid = std::move(counts);
    }

    if (const YAML::Node ps = root["points"]) {
      if (!ps.IsSequence()) bad(ps, "points must be a list");
      for (const auto& p : ps) {
        if (!p.IsSequence() || p.size() != static_cast<std::size_t>(c.dim()))
          bad(p, "each point needs one coordinate per axis");
        std::vector<double> q;
        for (const auto& v : p) q.push_back(number_at(v, m.constants, "point coordinate"));
        m.points.push_back(std::move(q));
      }
    }
    return m;
  } catch (const YAML::Exception& e) {
    throw config_error(source + ": " + e.what());
  }
}

inline model load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Presets: "<kind>:n=<k>[,<key>=<value>...]".

struct preset_args {
  std::string kind;
  std::map<std::string, std::string> params;

  int integer(const std::string& key, int fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    int v = 0;
    auto r = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
    if (r.ec != std::errc{} || r.ptr != it->second.data() + it->second.size())
      throw config_error("preset parameter " + key + " must be an integer");
    return v;
  }
  bool flag(const std::string& key) const { return params.count(key) > 0; }
};

inline preset_args parse_preset(std::string_view spec) {
  preset_args a;
  auto colon = spec.find(':');
  a.kind = std::string(spec.substr(0, colon));
  if (colon == std::string_view::npos) return a;
  std::string_view rest = spec.substr(colon + 1);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    auto eq = item.find('=');
    if (eq == std::string_view::npos) a.params[std::string(item)] = "";
    else a.params[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return a;
}

inline bool is_preset(std::string_view spec) {
  std::string kind = parse_preset(spec).kind;
  return spec.find(':') != std::string_view::npos &&
         (kind == "eds" || kind == "minkowski" || kind == "random-torus" || kind == "flat-torus");
}

/// Fiber points of the EdS preset: a fixed pseudo-random set in the unit box.
inline std::vector<std::vector<double>> eds_fiber_points(int n, int count = 25) {
  rng r(20240611);
  return random_points(flat_fiber(n).domain, static_cast<std::size_t>(count), r);
}

inline const std::vector<double>& eds_times() {
  static const std::vector<double> t{0.5, 1.0, 2.0, 10.0};
  return t;
}

inline model preset_model(std::string_view spec, std::uint64_t seed = 1) {
  preset_args a = parse_preset(spec);
  const int n = a.integer("n", 3);
  if (n < 1 || n > 15) throw config_error("preset dimension out of range");
  if (a.kind == "eds") {
    model m = assemble(eds_spec(eds_solution{n}, flat_fiber(n)));
    m.name = "eds:n=" + std::to_string(n);
    for (double t : eds_times())
      for (auto p : eds_fiber_points(n)) {
        p.push_back(t);
        m.points.push_back(std::move(p));
      }
    return m;
  }
  if (a.kind == "minkowski") {
    if (n < 2) throw config_error("minkowski needs n >= 2");
    std::vector<axis> axes{{"t", -1, 1, false}};
    for (int i = 1; i < n; ++i) axes.push_back({"x" + std::to_string(i), -1, 1, false});
    chart c(std::move(axes));
    model m;
    m.name = "minkowski:n=" + std::to_string(n);
    m.domain = c;
    m.metric = metric_field(c);
    for (int i = 0; i < n; ++i) m.metric(i, i) = constant(i == 0 ? -1 : 1);
    m.potential = {c, constant(0)};
    rng r(seed);
    m.points = random_points(c, 10, r);
    return m;
  }
  if (a.kind == "random-torus") {
    if (n < 2 || n > 4) throw config_error("random-torus supports n = 2, 3, 4");
    model m = random_torus_model(n, seed, a.flag("lorentzian"), a.integer("grid", n == 2 ? 64 : 24));
    rng r(seed ^ 0x9e3779b97f4a7c15ULL);
    m.points = random_points(m.domain, 16, r);
    return m;
  }
  if (a.kind == "flat-torus") {
    model m = random_torus_model(n, seed, false, a.integer("grid", 16));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) m.metric(i, j) = constant(i == j ? 1 : 0);
    m.potential.value = constant(0);
    m.name = "flat-torus:n=" + std::to_string(n) + ":seed=" + std::to_string(seed);
    rng r(seed);
    m.points = random_points(m.domain, 8, r);
    return m;
  }
  throw config_error("unknown preset '" + a.kind + "'");
}

/// A preset name or a path to a YAML model file.
inline model resolve_model(const std::string& spec, std::uint64_t seed = 1) {
  if (is_preset(spec)) return preset_model(spec, seed);
  return load_model_file(spec);
}

}  // namespace beric
