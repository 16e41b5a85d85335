// beric: check field equations, first variations and curvature of model files.
//
// Exit codes: 0 pass, 1 residual above tolerance, 2 configuration error,
// 3 singular metric or expression domain error, 4 unsupported domain.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "beric/report.hpp"

namespace {

using namespace beric;

void emit(const json& j, const std::string& output) {
  std::string text = j.dump(2) + "\n";
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw config_error("cannot write '" + output + "'");
  out << text;
}

std::optional<std::vector<int>> parse_grid(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::vector<int> counts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      counts.push_back(v);
    } catch (const std::exception&) {
      throw config_error("--grid expects positive integers separated by commas");
    }
  }
  return counts;
}

void print_summary(const residual_report& r) {
  std::cout << r.model << ": " << r.points.size() << " points\n";
  for (const auto& [name, v] : r.aggregates) {
    auto tol = r.tolerances.find(name);
    std::cout << "  " << name << " max " << format_number(v);
    if (tol != r.tolerances.end()) std::cout << (v <= tol->second ? "  ok" : "  FAIL") << " (tol " << format_number(tol->second) << ")";
    std::cout << "\n";
  }
  for (const auto& [k, v] : r.info) std::cout << "  " << k << ": " << v << "\n";
  std::cout << (r.pass() ? "PASS" : "FAIL") << "\n";
}

void print_summary(const variation_report& r) {
  std::cout << r.model << " [" << r.digest << "]\n"
            << "  analytic " << format_number(r.totals.analytic) << "\n"
            << "  numeric  " << format_number(r.totals.numeric) << "\n"
            << "  relative gap " << format_number(r.totals.relative_gap()) << "\n";
  for (const auto& [k, v] : r.terms.errors) std::cout << "  " << k << " " << format_number(v) << "\n";
  std::cout << "  delta_laplacian with lap f in place of lap h " << format_number(r.terms.laplacian_with_lap_f)
            << "\n"
            << (r.pass() ? "PASS" : "FAIL") << "\n";
}

void print_curvature(const json& j) {
  std::cout << j["model"].get<std::string>() << " (m = " << j["m"].get<std::string>() << ")\n";
  auto scalar = [](const char* label, const json& v) {
    std::cout << "  " << label << " " << format_number(v.get<double>()) << "\n";
  };
  auto table = [](const char* label, const json& rows) {
    std::cout << "  " << label << "\n";
    for (const auto& row : rows) {
      std::cout << "    ";
      for (const auto& v : row) {
        std::string s = format_number(v.get<double>());
        std::cout << s << std::string(s.size() < 24 ? 24 - s.size() : 1, ' ');
      }
      std::cout << "\n";
    }
  };
  for (const auto& pt : j["points"]) {
    std::cout << "point";
    for (const auto& c : pt["coords"]) std::cout << " " << format_number(c.get<double>());
    std::cout << "\n";
    table("g", pt["metric"]);
    table("Ric", pt["ricci"]);
    scalar("R", pt["scalar_curvature"]);
    table("Hess f", pt["hessian"]);
    scalar("lap f", pt["laplacian"]);
    scalar("|grad f|^2", pt["grad_norm_sq"]);
    table("Ric_f^m", pt["bakry_emery_ricci"]);
    scalar("R_f", pt["weighted_scalar_curvature"]);
    table("T^f", pt["stress"]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Field equations and first variation of the weighted scalar curvature action"};
  app.require_subcommand(1);

  std::string model_spec, output, m_text, grid_text;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  bool as_json = false;
  std::vector<std::string> inputs;

  auto common = [&](CLI::App* c) {
    c->add_option("--model", model_spec, "model file or preset (eds:n=3, minkowski:n=2, random-torus:n=2, flat-torus:n=2)")
        ->required();
    c->add_option("--tol", tol, "tolerance");
    c->add_option("--seed", seed, "seed for sampled points and random presets");
    c->add_flag("--json", as_json, "write the JSON report to stdout");
    c->add_option("--output", output, "write the JSON report to a file");
  };

  CLI::App* check = app.add_subcommand("check", "residuals of the field equations at sample points");
  common(check);
  check->add_option("--m", m_text, "Bakry-Emery parameter for the quasi-Einstein fit (real or inf)");

  CLI::App* variation = app.add_subcommand("variation", "analytic versus numeric first variation on a torus");
  common(variation);
  variation->add_option("--grid", grid_text, "nodes per axis, e.g. 64,64");

  CLI::App* curvature = app.add_subcommand("curvature", "Ricci, scalar and Bakry-Emery curvature at sample points");
  common(curvature);
  curvature->add_option("--m", m_text, "Bakry-Emery parameter (real or inf)");

  CLI::App* merge = app.add_subcommand("report-merge", "merge residual reports");
  merge->add_option("inputs", inputs, "report files")->required();
  merge->add_option("--output", output, "merged report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      model m = resolve_model(model_spec, seed);
      check_options opt;
      if (tol) opt.tol = *tol;
      if (!m_text.empty()) opt.m = be_param::parse(m_text);
      opt.seed = seed;
      residual_report r = run_check(m, opt);
      if (as_json || !output.empty()) emit(to_json(r), as_json ? "-" : output);
      if (!as_json) print_summary(r);
      return r.pass() ? 0 : 1;
    }
    if (*variation) {
      model m = resolve_model(model_spec, seed);
      variation_options opt;
      if (tol) opt.tol = *tol;
      opt.grid = parse_grid(grid_text);
      opt.seed = seed;
      variation_report r = run_variation(m, opt);
      if (as_json || !output.empty()) emit(to_json(r), as_json ? "-" : output);
      if (!as_json) print_summary(r);
      return r.pass() ? 0 : 1;
    }
    if (*curvature) {
      model m = resolve_model(model_spec, seed);
      be_param bm = m_text.empty() ? be_param::infinity() : be_param::parse(m_text);
      json j = run_curvature(m, bm, seed);
      if (as_json || !output.empty()) emit(j, as_json ? "-" : output);
      if (!as_json) print_curvature(j);
      return 0;
    }
    if (*merge) {
      residual_report total;
      for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot read '" + path + "'");
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          throw config_error(path + ": " + e.what());
        }
        total.merge(residual_report_from_json(j));
      }
      emit(to_json(total), output);
      return total.pass() ? 0 : 1;
    }
  } catch (const config_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const singular_metric_error& e) {
    std::cerr << "singular metric: " << e.what() << "\n";
    return 3;
  } catch (const domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const unsupported_domain_error& e) {
    std::cerr << "unsupported domain: " << e.what() << "\n";
    return 4;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
