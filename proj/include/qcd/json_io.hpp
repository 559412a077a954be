#pragma once

#include <string>

#include <json.hpp>

#include "qcd/deform.hpp"
#include "qcd/extremals.hpp"
#include "qcd/integral_ops.hpp"
#include "qcd/norms.hpp"
#include "qcd/schwarzian.hpp"
#include "qcd/series.hpp"

// JSON wire formats.  Complex numbers are [re, im] pairs throughout; every
// top-level document carries a spec_version field.

namespace qcd {

inline constexpr const char* kSpecVersion = "1";

inline nlohmann::json to_json(cx z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline cx complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw PreconditionError("json: complex values are [re, im] pairs");
  return cx(j[0].get<double>(), j[1].get<double>());
}

inline nlohmann::json to_json(const PowerSeries& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (int k = 0; k <= f.degree(); ++k) coeffs.push_back(to_json(f.coeff(k)));
  return nlohmann::json{{"degree", f.degree()}, {"coeffs", coeffs}};
}

inline PowerSeries series_from_json(const nlohmann::json& j) {
  const int degree = j.at("degree").get<int>();
  std::vector<cx> c;
  for (const auto& e : j.at("coeffs")) c.push_back(complex_from_json(e));
  if (static_cast<int>(c.size()) != degree + 1)
    throw PreconditionError("json: series degree does not match coefficient count");
  return PowerSeries(std::move(c));
}

inline nlohmann::json to_json(const BoundarySamples& s) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : s.values) values.push_back(to_json(v));
  return nlohmann::json{{"radius", s.radius}, {"values", values}};
}

inline BoundarySamples boundary_from_json(const nlohmann::json& j) {
  std::vector<cx> values;
  for (const auto& e : j.at("values")) values.push_back(complex_from_json(e));
  return BoundarySamples(j.at("radius").get<double>(), std::move(values));
}

inline nlohmann::json to_json(const NormReport& r) {
  nlohmann::json j{{"value", r.value},
                   {"quadrature_points", r.quadrature_points},
                   {"estimated_error", r.estimated_error}};
  if (r.is_bloch)
    j["p"] = "bloch";
  else
    j["p"] = r.p;
  return j;
}

inline nlohmann::json to_json(const BoundReport& r) {
  return nlohmann::json{{"functional_value", r.functional_value},
                        {"bound", r.bound},
                        {"margin", r.margin},
                        {"achiever_is_extremal", r.achiever_is_extremal}};
}

inline nlohmann::json to_json(const AnnulusSpec& a) {
  return nlohmann::json{{"c0", to_json(a.center)}, {"R", a.R}};
}

inline nlohmann::json to_json(const LaurentDensity& d) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : d.terms()) {
    nlohmann::json term{{"a", t.a}, {"b", t.b}, {"re", t.coeff.real()}, {"im", t.coeff.imag()}};
    if (t.q != 0) term["q"] = t.q;  // log-radial extension terms only
    terms.push_back(term);
  }
  return nlohmann::json{{"annulus", to_json(d.annulus())}, {"terms", terms}};
}

inline LaurentDensity density_from_json(const nlohmann::json& j) {
  const auto& ja = j.at("annulus");
  LaurentDensity d(AnnulusSpec(complex_from_json(ja.at("c0")), ja.at("R").get<double>()));
  for (const auto& t : j.at("terms"))
    d.add(t.at("a").get<int>(), t.at("b").get<int>(),
          cx(t.at("re").get<double>(), t.at("im").get<double>()),
          t.contains("q") ? t.at("q").get<int>() : 0);
  return d;
}

inline nlohmann::json to_json(const MapRepresentation& m) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : m.laurent_coeffs) coeffs.push_back(to_json(c));
  return nlohmann::json{
      {"coeffs", coeffs},
      {"residuals", {{"beltrami", m.residuals.beltrami}, {"conformal", m.residuals.conformal}}}};
}

inline nlohmann::json to_json(const SchwarzianPair& p) {
  return nlohmann::json{{"theta", p.theta},
                        {"tau", p.tau},
                        {"w_coeffs", to_json(p.w).at("coeffs")},
                        {"phi_coeffs", to_json(p.phi).at("coeffs")}};
}

inline nlohmann::json to_json(const DeformationDiagnostics& d) {
  return nlohmann::json{{"coeff_residuals", d.coeff_residuals},
                        {"area_norm_delta", d.area_norm_delta},
                        {"hardy_norm_delta", d.hardy_norm_delta},
                        {"newton_iterations", d.newton_iterations},
                        {"jacobian_refreshes", d.jacobian_refreshes},
                        {"mu_sup_norm", d.mu_sup_norm},
                        {"neumann_iterations", d.neumann_iterations},
                        {"neumann_residual", d.neumann_residual},
                        {"beltrami_residual", d.beltrami_residual},
                        {"conformal_residual", d.conformal_residual},
                        {"omega_sup", d.omega_sup}};
}

inline nlohmann::json to_json(const DeformationResult& r) {
  nlohmann::json xi = nlohmann::json::array();
  for (const auto& z : r.xi) xi.push_back(to_json(z));
  return nlohmann::json{{"spec_version", kSpecVersion},
                        {"xi", xi},
                        {"tau", r.tau},
                        {"mu", to_json(r.mu)},
                        {"map", to_json(r.map)},
                        {"f_star", to_json(r.f_star)},
                        {"converged", r.converged},
                        {"diagnostics", to_json(r.diagnostics)}};
}

inline nlohmann::json to_json(const DeformationProblem& p) {
  nlohmann::json d = nlohmann::json::array();
  for (const auto& z : p.d) d.push_back(to_json(z));
  return nlohmann::json{{"spec_version", kSpecVersion},
                        {"f", to_json(p.f)},
                        {"p", p.p},
                        {"n", p.n},
                        {"d", d},
                        {"a", p.a},
                        {"eps_budget", p.eps_budget},
                        {"first_index", p.first_index},
                        {"annulus_R", p.annulus_R}};
}

inline DeformationProblem problem_from_json(const nlohmann::json& j) {
  DeformationProblem p;
  p.f = series_from_json(j.at("f"));
  p.p = j.at("p").get<double>();
  p.n = j.at("n").get<int>();
  for (const auto& e : j.at("d")) p.d.push_back(complex_from_json(e));
  p.a = j.value("a", 0.0);
  p.eps_budget = j.value("eps_budget", 1e-2);
  p.first_index = j.value("first_index", 0);
  p.annulus_R = j.value("annulus_R", 0.0);
  return p;
}

}  // namespace qcd
