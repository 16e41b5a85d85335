#pragma once

// Field equations for pairs (g, f):
//   full:     Ric - R/2 g = T^f,  lap f = 0,   T^f = df (x) df - |grad f|^2/2 g
//   reduced:  Ric = df (x) df,    lap f = 0    (n >= 3)
// together with the divergence identity for T^f and the steady quasi-Einstein
// characterisation of critical pairs.

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "beric/bakry_emery.hpp"
#include "beric/error.hpp"
#include "beric/geometry.hpp"

namespace beric {

/// df (x) df - |grad f|^2/2 g
inline Eigen::MatrixXd stress_tensor(const point_frame& fr, const jet& f) {
  Eigen::VectorXd df = differential(f);
  return outer(df, df) - 0.5 * grad_norm_sq(f, fr) * fr.g();
}

/// T^f with its coordinate derivatives; needs f jets of order 2.
inline sym2_jet stress_tensor_sym2(const point_frame& fr, const jet& f) {
  return df_tensor_df(f) -
         scaled_metric(0.5 * grad_norm_sq(f, fr), 0.5 * grad_norm_sq_differential(f, fr), fr);
}

struct field_residual {
  Eigen::MatrixXd tensor;
  double laplacian = 0.0;
};

/// (Ric - R/2 g - T^f, lap f)
inline field_residual full_residual(const point_frame& fr, const jet& f) {
  return {fr.ricci() - 0.5 * fr.scalar_curvature() * fr.g() - stress_tensor(fr, f),
          laplacian(f, fr)};
}

inline void require_dim3(const point_frame& fr, const char* what) {
  if (fr.dim() < 3)
    throw unsupported_domain_error(std::string(what) + " requires dimension >= 3");
}

/// (Ric - df (x) df, lap f)
inline field_residual reduced_residual(const point_frame& fr, const jet& f) {
  require_dim3(fr, "reduced field equations");
  Eigen::VectorXd df = differential(f);
  return {fr.ricci() - outer(df, df), laplacian(f, fr)};
}

/// R - |grad f|^2
inline double trace_gap(const point_frame& fr, const jet& f) {
  require_dim3(fr, "trace identity");
  return fr.scalar_curvature() - grad_norm_sq(f, fr);
}

struct equivalence_result {
  double full_norm = 0;             // max-abs of the full residual tensor
  double reduced_norm = 0;          // max-abs of the reduced residual tensor
  double full_from_reduced = 0;     // |E_full - (E_red - tr(E_red)/2 g)|
  double reduced_from_full = 0;     // |E_red - (E_full - tr(E_full)/(n-2) g)|
  double trace_identity = 0;        // |tr E_full - (1 - n/2)(R - |grad f|^2)|
  bool equivalent = false;
};

/// Checks that each residual, transformed by the trace substitution, reproduces
/// the other. `tol` is absolute on tensors of unit scale.
inline equivalence_result equivalence_check(const point_frame& fr, const jet& f, double tol = 1e-12) {
  require_dim3(fr, "equivalence check");
  const int n = fr.dim();
  equivalence_result r;
  field_residual full = full_residual(fr, f);
  field_residual red = reduced_residual(fr, f);
  r.full_norm = max_abs(full.tensor);
  r.reduced_norm = max_abs(red.tensor);
  double tr_red = trace2(red.tensor, fr);
  double tr_full = trace2(full.tensor, fr);
  r.full_from_reduced = max_abs(full.tensor - (red.tensor - 0.5 * tr_red * fr.g()));
  r.reduced_from_full = max_abs(red.tensor - (full.tensor - tr_full / (n - 2) * fr.g()));
  r.trace_identity = std::abs(tr_full - (1.0 - 0.5 * n) * trace_gap(fr, f));
  double scale = std::max({1.0, max_abs(fr.ricci()), max_abs(fr.g())});
  r.equivalent = r.full_from_reduced <= tol * scale && r.reduced_from_full <= tol * scale;
  return r;
}

/// div T^f and the two halves of its decomposition:
///   div(df (x) df)          = lap f df + Hess f(grad f, .)
///   div(|grad f|^2/2 g)     = Hess f(grad f, .)
struct divergence_result {
  Eigen::VectorXd div_stress;          // div T^f
  Eigen::VectorXd div_df_df;           // div(df (x) df)
  Eigen::VectorXd div_half_norm_g;     // div(|grad f|^2/2 g)
  Eigen::VectorXd laplacian_df;        // lap f df
  Eigen::VectorXd hess_grad;           // Hess f(grad f, .)
  double laplacian = 0;

  /// div(df (x) df) - lap f df - Hess f(grad f, .)
  Eigen::VectorXd df_df_gap() const { return div_df_df - laplacian_df - hess_grad; }
  /// div(|grad f|^2/2 g) - Hess f(grad f, .)
  Eigen::VectorXd norm_gap() const { return div_half_norm_g - hess_grad; }
};

inline divergence_result divergence_check(const point_frame& fr, const jet& f) {
  if (f.order() < 2) throw error("divergence check needs scalar jets of order 2");
  divergence_result r;
  sym2_jet dfdf = df_tensor_df(f);
  sym2_jet half_norm_g =
      scaled_metric(0.5 * grad_norm_sq(f, fr), 0.5 * grad_norm_sq_differential(f, fr), fr);
  r.div_df_df = div_sym2(dfdf, fr);
  r.div_half_norm_g = div_sym2(half_norm_g, fr);
  r.div_stress = div_sym2(dfdf - half_norm_g, fr);
  r.laplacian = laplacian(f, fr);
  Eigen::VectorXd df = differential(f);
  r.laplacian_df = r.laplacian * df;
  r.hess_grad = hessian(f, fr) * gradient(f, fr);
  return r;
}

// ---------------------------------------------------------------------------
// Steady quasi-Einstein characterisation of critical pairs.

/// The tensors the characterisation is stated in. Filled from a frame, or
/// directly with arbitrary symmetric tensors for algebraic fuzzing.
struct curvature_terms {
  Eigen::MatrixXd g, g_inv, ricci, hessian, df_df;
};

inline curvature_terms curvature_terms_at(const point_frame& fr, const jet& f) {
  Eigen::VectorXd df = differential(f);
  return {fr.g(), fr.g_inv(), fr.ricci(), hessian(f, fr), outer(df, df)};
}

struct critical_pair_report {
  double field_norm = 0;  // max(|Ric - df (x) df|, |lap f|)
  double hess_norm = 0;   // |Hess f|
  double qe0_norm = 0;    // |Ric + Hess f - df (x) df|
  double implied_lambda = 0;  // tr Hess f / n, the only lambda compatible with Hess f = lambda g
  bool field_zero = false;
  bool hess_zero = false;
  bool qe0_zero = false;
  std::vector<std::string> violations;

  bool holds() const { return violations.empty(); }
};

/// Evaluates the three predicates and every implication between them:
///   critical and steady quasi-Einstein  =>  Hess f = 0
///   critical and Hess f = 0             =>  steady quasi-Einstein
///   steady quasi-Einstein and Hess f = 0 =>  critical
///   critical and Hess f = lambda g      =>  lambda = 0
inline critical_pair_report critical_pair_check(const curvature_terms& t, double tol = 1e-9) {
  critical_pair_report r;
  const double n = static_cast<double>(t.g.rows());
  double lap = t.g_inv.cwiseProduct(t.hessian).sum();
  r.field_norm = std::max(max_abs(t.ricci - t.df_df), std::abs(lap));
  r.hess_norm = max_abs(t.hessian);
  r.qe0_norm = max_abs(t.ricci + t.hessian - t.df_df);
  r.implied_lambda = lap / n;
  r.field_zero = r.field_norm <= tol;
  r.hess_zero = r.hess_norm <= tol;
  r.qe0_zero = r.qe0_norm <= tol;
  if (r.field_zero && r.qe0_zero && !r.hess_zero)
    r.violations.emplace_back("critical and steady quasi-Einstein but Hess f != 0");
  if (r.field_zero && r.hess_zero && !r.qe0_zero)
    r.violations.emplace_back("critical with Hess f = 0 but not steady quasi-Einstein");
  if (r.qe0_zero && r.hess_zero && !r.field_zero)
    r.violations.emplace_back("steady quasi-Einstein with Hess f = 0 but not critical");
  if (r.field_zero && max_abs(t.hessian - r.implied_lambda * t.g) <= tol &&
      std::abs(r.implied_lambda) > tol)
    r.violations.emplace_back("critical with Hess f = lambda g for lambda != 0");
  return r;
}

inline critical_pair_report critical_pair_check(const point_frame& fr, const jet& f, double tol = 1e-9) {
  return critical_pair_check(curvature_terms_at(fr, f), tol);
}

// ---------------------------------------------------------------------------
// Residual reports.

struct residual_record {
  std::vector<double> coords;
  std::map<std::string, double> norms;
};

/// Per-point residual norms with running maxima. Merging is associative and
/// commutative on the aggregates.
class residual_report {
 public:
  std::string model;
  std::vector<residual_record> points;
  std::map<std::string, double> aggregates;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> info;

  void add(residual_record rec) {
    for (const auto& [name, v] : rec.norms) {
      auto [it, inserted] = aggregates.emplace(name, v);
      if (!inserted) it->second = std::max(it->second, v);
    }
    points.push_back(std::move(rec));
  }

  void merge(const residual_report& other) {
    for (const auto& rec : other.points) add(rec);
    for (const auto& [name, v] : other.aggregates) {
      auto [it, inserted] = aggregates.emplace(name, v);
      if (!inserted) it->second = std::max(it->second, v);
    }
    for (const auto& [name, tol] : other.tolerances) {
      auto [it, inserted] = tolerances.emplace(name, tol);
      if (!inserted) it->second = std::min(it->second, tol);
    }
    if (model.empty()) model = other.model;
    else if (!other.model.empty() && other.model != model) model += "+" + other.model;
  }

  /// Every aggregate with a tolerance is within it. NaN never passes.
  bool pass() const {
    for (const auto& [name, tol] : tolerances) {
      auto it = aggregates.find(name);
      if (it != aggregates.end() && !(it->second <= tol)) return false;
    }
    return true;
  }
};

/// The standard residual set at a point: full_eq, laplacian, div_Tf, and for
/// n >= 3 reduced_eq and trace_gap.
inline residual_record field_residuals(const point_frame& fr, const jet& f) {
  residual_record rec;
  rec.coords = fr.point();
  field_residual full = full_residual(fr, f);
  rec.norms["full_eq"] = max_abs(full.tensor);
  rec.norms["laplacian"] = std::abs(full.laplacian);
  rec.norms["div_Tf"] = max_abs(div_sym2(stress_tensor_sym2(fr, f), fr));
  if (fr.dim() >= 3) {
    rec.norms["reduced_eq"] = max_abs(reduced_residual(fr, f).tensor);
    rec.norms["trace_gap"] = std::abs(trace_gap(fr, f));
  }
  return rec;
}

}  // namespace beric
