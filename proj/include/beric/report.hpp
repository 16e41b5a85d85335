#pragma once

// Runs behind the command-line verbs, and their JSON form. Reports contain no
// timestamps or addresses, so equal inputs give byte-identical output.

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beric/bakry_emery.hpp"
#include "beric/config.hpp"
#include "beric/field_eq.hpp"
#include "beric/model.hpp"
#include "beric/variation.hpp"

namespace beric {

using json = nlohmann::ordered_json;

/// FNV-1a 64 over the model written out as text.
inline std::string model_digest(const model& m) {
  std::string text;
  for (const axis& a : m.domain.axes()) {
    text += a.name + "[";
    detail::append_number(text, a.lo);
    text += ",";
    detail::append_number(text, a.hi);
    text += a.periodic ? ")p;" : "];";
  }
  const auto& names = m.domain.names();
  auto add_tensor = [&](const char* tag, const sym_tensor_field& t) {
    text += tag;
    for (int i = 0; i < t.dim(); ++i)
      for (int j = i; j < t.dim(); ++j) text += print(t(i, j), names) + ";";
  };
  add_tensor("g:", m.metric);
  text += "f:" + print(m.potential.value, names) + ";";
  if (m.perturbation) add_tensor("s:", *m.perturbation);
  if (m.direction) text += "h:" + print(m.direction->value, names) + ";";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 15];
  return out;
}

/// Evaluation points: the model's own, else `count` seeded points inside the box.
inline std::vector<std::vector<double>> model_points(const model& m, std::uint64_t seed, std::size_t count = 16) {
  if (!m.points.empty()) return m.points;
  rng r(seed);
  std::vector<std::vector<double>> pts;
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> p;
    for (const axis& a : m.domain.axes()) {
      double margin = a.periodic ? 0.0 : 0.05 * a.length();
      p.push_back(r.uniform(a.lo + margin, a.hi - margin));
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

inline std::string format_number(double v) {
  std::string s;
  detail::append_number(s, v);
  return s;
}

// ---------------------------------------------------------------------------
// check

struct check_options {
  double tol = 1e-9;
  std::optional<be_param> m;
  std::uint64_t seed = 1;
};

/// Field-equation residuals at every point of the model. With a Bakry-Emery
/// parameter, the best-fit quasi-Einstein constant is added as information.
inline residual_report run_check(const model& m, const check_options& opt) {
  residual_report rep;
  rep.model = m.name;
  auto pts = model_points(m, opt.seed);
  check_nondegenerate(m.metric, pts);
  model_evaluator ev(m);
  std::vector<Eigen::MatrixXd> be, gs;
  for (const auto& p : pts) {
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    rep.add(field_residuals(fr, x.f));
    if (opt.m) {
      be.push_back(be_ricci(fr, x.f, *opt.m));
      gs.push_back(fr.g());
    }
  }
  for (const auto& [name, v] : rep.aggregates) rep.tolerances[name] = opt.tol;
  rep.info["seed"] = std::to_string(opt.seed);
  if (opt.m) {
    double lambda = best_fit_lambda(be, gs);
    double worst = 0;
    for (std::size_t i = 0; i < be.size(); ++i) worst = std::max(worst, max_abs(be[i] - lambda * gs[i]));
    rep.info["m"] = opt.m->to_string();
    rep.info["best_fit_lambda"] = format_number(lambda);
    rep.info["quasi_einstein_residual"] = format_number(worst);
    rep.info["quasi_einstein_kind"] = std::string(to_string(classify(lambda)));
  }
  return rep;
}

inline json to_json(const residual_report& r) {
  json j;
  j["model"] = r.model;
  json pts = json::array();
  for (const auto& rec : r.points) {
    json o;
    o["coords"] = rec.coords;
    json norms = json::object();
    for (const auto& [k, v] : rec.norms) norms[k] = v;
    o["norms"] = norms;
    pts.push_back(std::move(o));
  }
  j["points"] = std::move(pts);
  json agg = json::object(), tol = json::object(), info = json::object();
  for (const auto& [k, v] : r.aggregates) agg[k] = v;
  for (const auto& [k, v] : r.tolerances) tol[k] = v;
  for (const auto& [k, v] : r.info) info[k] = v;
  j["aggregates"] = agg;
  j["pass"] = r.pass();
  j["tolerances"] = tol;
  j["info"] = info;
  return j;
}

inline residual_report residual_report_from_json(const json& j) {
  try {
    residual_report r;
    r.model = j.at("model").get<std::string>();
    for (const auto& o : j.at("points")) {
      residual_record rec;
      rec.coords = o.at("coords").get<std::vector<double>>();
      for (const auto& [k, v] : o.at("norms").items()) rec.norms[k] = v.is_null() ? NAN : v.get<double>();
      r.points.push_back(std::move(rec));
    }
    for (const auto& [k, v] : j.at("aggregates").items()) r.aggregates[k] = v.is_null() ? NAN : v.get<double>();
    for (const auto& [k, v] : j.at("tolerances").items()) r.tolerances[k] = v.get<double>();
    if (j.contains("info"))
      for (const auto& [k, v] : j.at("info").items()) r.info[k] = v.get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw config_error(std::string("malformed residual report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// variation

struct variation_options {
  double tol = 1e-6;
  std::optional<std::vector<int>> grid;
  std::vector<double> steps = default_variation_steps();
  std::uint64_t seed = 1;
  std::size_t term_points = 16;
};

struct variation_report {
  std::string model;
  std::string digest;
  std::vector<int> grid;
  std::vector<double> steps;
  std::uint64_t seed = 0;
  variation_totals totals;
  term_errors terms;
  double tol = 0;

  bool integral_pass() const {
    double gap = std::abs(totals.analytic - totals.numeric);
    double floor = 1e-9 * std::max(1.0, totals.integrand_l1);
    return totals.relative_gap() <= tol || gap <= floor;
  }
  bool terms_pass() const {
    for (const auto& [k, v] : terms.errors)
      if (!(v <= tol)) return false;
    return true;
  }
  bool pass() const { return integral_pass() && terms_pass(); }
};

inline variation_report run_variation(const model& m, const variation_options& opt) {
  if (!m.perturbation || !m.direction) throw config_error("variation needs a perturbation block (s and h)");
  sample_grid grid = grid_of(m, opt.grid);
  variation_report r;
  r.model = m.name;
  r.digest = model_digest(m);
  r.grid = grid.counts();
  r.steps = opt.steps;
  r.seed = opt.seed;
  r.tol = opt.tol;
  r.totals = first_variation(m, grid, opt.steps);
  std::vector<std::vector<double>> pts;
  std::size_t stride = std::max<std::size_t>(1, grid.size() / opt.term_points);
  for (std::size_t i = stride / 2; i < grid.size() && pts.size() < opt.term_points; i += stride) {
    auto p = grid.point(i);
    pts.emplace_back(p.begin(), p.end());
  }
  r.terms = check_terms(m, pts, opt.steps);
  return r;
}

inline json to_json(const variation_report& r) {
  json j;
  j["model"] = r.model;
  j["digest"] = r.digest;
  j["grid"] = r.grid;
  j["steps"] = r.steps;
  j["seed"] = r.seed;
  j["analytic"] = r.totals.analytic;
  j["numeric"] = r.totals.numeric;
  j["relative_gap"] = r.totals.relative_gap();
  j["integrand_l1"] = r.totals.integrand_l1;
  j["divergence_integral"] = r.totals.div_x_integral;
  j["integration_by_parts_gap"] = r.totals.ibp_gap;
  json terms = json::object();
  for (const auto& [k, v] : r.terms.errors) terms[k] = v;
  j["term_errors"] = terms;
  j["laplacian_variation_with_lap_f"] = r.terms.laplacian_with_lap_f;
  j["tolerance"] = r.tol;
  j["pass"] = r.pass();
  return j;
}

// ---------------------------------------------------------------------------
// curvature

inline json run_curvature(const model& m, const be_param& bm, std::uint64_t seed) {
  auto pts = model_points(m, seed);
  check_nondegenerate(m.metric, pts);
  model_evaluator ev(m);
  json j;
  j["model"] = m.name;
  j["m"] = bm.to_string();
  json arr = json::array();
  auto mat = [](const Eigen::MatrixXd& a) {
    json rows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
      std::vector<double> row(static_cast<std::size_t>(a.cols()));
      for (int k = 0; k < a.cols(); ++k) row[static_cast<std::size_t>(k)] = a(i, k);
      rows.push_back(row);
    }
    return rows;
  };
  for (const auto& p : pts) {
    const model_sample& x = ev.at(p, 2);
    point_frame fr(x.g, p);
    json o;
    o["coords"] = p;
    o["metric"] = mat(fr.g());
    o["ricci"] = mat(fr.ricci());
    o["scalar_curvature"] = fr.scalar_curvature();
    o["hessian"] = mat(hessian(x.f, fr));
    o["laplacian"] = laplacian(x.f, fr);
    o["grad_norm_sq"] = grad_norm_sq(x.f, fr);
    o["bakry_emery_ricci"] = mat(be_ricci(fr, x.f, bm));
    o["weighted_scalar_curvature"] = weighted_scalar(fr, x.f);
    o["stress"] = mat(stress_tensor(fr, x.f));
    arr.push_back(std::move(o));
  }
  j["points"] = std::move(arr);
  return j;
}

}  // namespace beric
