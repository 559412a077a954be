// qcdeform: batch experiment runner over the deformation library.
//
// Subcommands: kappa, sweep, deform, bergman-demo, parseval.
// Exit codes: 0 pass, 2 contract violation, 3 precondition/domain error,
// 4 non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcd/deform.hpp"
#include "qcd/detail/parallel.hpp"
#include "qcd/detail/rng.hpp"
#include "qcd/extremals.hpp"
#include "qcd/json_io.hpp"
#include "qcd/norms.hpp"
#include "qcd/schwarzian.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitNoConvergence = 4;

void write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw qcd::PreconditionError("cannot open output file: " + out_path);
  out << payload;
}

qcd::PowerSeries sample_for(std::uint64_t seed, double p) {
  // even seeds: exponential samples; odd seeds: zero-free polynomials
  const auto style = (seed % 2 == 0) ? qcd::SampleStyle::exp_of_series
                                     : qcd::SampleStyle::zero_free_polynomial;
  return qcd::sample_nonvanishing(seed, p, style);
}

int cmd_kappa(int n, double p, int degree, const std::string& out, const std::string& format) {
  const qcd::PowerSeries kappa = qcd::kappa_series(n, p, degree);
  const auto report = qcd::verify_bound(kappa, n, p, 1e-9, 0.85);
  std::string payload;
  if (format == "csv") {
    std::ostringstream os;
    os << "# qcdeform kappa v" << qcd::kSpecVersion << "\n";
    os << "k,re,im,abs\n";
    os.precision(17);
    for (int k = 0; k <= kappa.degree(); ++k) {
      const qcd::cx c = kappa.coeff(k);
      if (std::abs(c) == 0.0 && k % n != 0) continue;
      os << k << "," << c.real() << "," << c.imag() << "," << std::abs(c) << "\n";
    }
    os << "# c_n_abs=" << report.functional_value << " bound=" << report.bound
       << " margin=" << report.margin << "\n";
    payload = os.str();
  } else {
    nlohmann::json j{{"spec_version", qcd::kSpecVersion},
                     {"n", n},
                     {"p", p},
                     {"series", qcd::to_json(kappa)},
                     {"bound_report", qcd::to_json(report)}};
    payload = j.dump(2);
  }
  write_output(out, payload);
  return report.margin >= -1e-9 ? kExitOk : kExitContract;
}

int cmd_sweep(const std::vector<double>& p_list, const std::vector<int>& n_list, int count,
              std::uint64_t seed, const std::string& out) {
  if (p_list.empty() || n_list.empty())
    throw qcd::PreconditionError("sweep: p and n lists must be nonempty");
  for (double p : p_list)
    if (!(p > 1.0)) throw qcd::PreconditionError("sweep: exponents must satisfy p > 1");
  for (int n : n_list)
    if (n < 1) throw qcd::PreconditionError("sweep: indices must be >= 1");
  struct Row {
    std::uint64_t seed;
    double p;
    int n;
    double cn, bound, margin;
  };
  std::vector<Row> rows(static_cast<std::size_t>(count) * p_list.size() * n_list.size());
  std::vector<std::string> errors(rows.size());
  const std::size_t per_p = static_cast<std::size_t>(count) * n_list.size();
  qcd::detail::parallel_for(static_cast<std::size_t>(count) * p_list.size(), [&](std::size_t ip) {
    const std::size_t pi = ip / count;
    const std::size_t ci = ip % count;
    const double p = p_list[pi];
    const std::uint64_t s = seed + ci;
    qcd::PowerSeries f = sample_for(s, p);
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      const std::size_t idx = pi * per_p + ci * n_list.size() + ni;
      try {
        const auto rep = qcd::verify_bound(f, n_list[ni], p);
        rows[idx] = Row{s, p, n_list[ni], rep.functional_value, rep.bound, rep.margin};
      } catch (const qcd::Error& e) {
        errors[idx] = e.what();
      }
    }
  });
  std::ostringstream os;
  os << "# qcdeform sweep v" << qcd::kSpecVersion << "\n";
  os << "seed,p,n,c_n_abs,bound,margin\n";
  os.precision(17);
  double min_margin = 1e300;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!errors[i].empty()) throw qcd::PreconditionError("sweep: " + errors[i]);
    const auto& r = rows[i];
    os << r.seed << "," << r.p << "," << r.n << "," << r.cn << "," << r.bound << ","
       << r.margin << "\n";
    min_margin = std::min(min_margin, r.margin);
  }
  os << "# min_margin=" << min_margin << "\n";
  write_output(out, os.str());
  return min_margin >= -1e-9 ? kExitOk : kExitContract;
}

int cmd_deform(std::uint64_t seed, double p, int n, double eps, double tol, double annulus_R,
               double corrupt_tau, const std::string& config_path, const std::string& out) {
  qcd::DeformationProblem problem;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw qcd::PreconditionError("cannot open config: " + config_path);
    nlohmann::json j;
    in >> j;
    problem = qcd::problem_from_json(j);
  } else {
    problem.f = qcd::sample_nonvanishing(seed, p, qcd::SampleStyle::exp_of_series);
    problem.p = p;
    problem.n = n;
    problem.d.assign(static_cast<std::size_t>(n) + 1, qcd::cx(0.0));
    problem.d[static_cast<std::size_t>(n)] = qcd::cx(0.0, eps);
    problem.a = 0.0;
    problem.eps_budget = 1e-2;
    problem.annulus_R = annulus_R;
  }
  qcd::DeformationTolerances tols;
  if (tol > 0.0) tols.newton_tol = tol;

  qcd::DeformationResult result = qcd::newton_deform(problem, tols);
  if (corrupt_tau != 0.0) {
    // diagnostic rebuild: corruption may exceed the solve policy budget
    qcd::DeformationTolerances loose = tols;
    loose.mu_sup_cap = 0.45;
    result = qcd::rebuild_with_parameters(problem, result.xi, result.tau + corrupt_tau, loose);
  }
  const auto contracts = qcd::verify_deformation(result, problem, tols, false);

  nlohmann::json j = qcd::to_json(result);
  j["contracts"] = {{"coefficients", contracts.coefficients},
                    {"area_norm", contracts.area_norm},
                    {"hardy_norm", contracts.hardy_norm},
                    {"conformal_on_image", contracts.conformal_on_image},
                    {"f_star_nonvanishing", contracts.f_star_nonvanishing}};
  write_output(out, j.dump(2));
  return contracts.all() ? kExitOk : kExitContract;
}

int cmd_bergman_demo(int degree, double eps, std::uint64_t seed, bool use_seed,
                     const std::string& out) {
  qcd::PowerSeries poly = qcd::PowerSeries::constant(qcd::cx(1.0));
  if (use_seed) {
    qcd::detail::Rng rng(seed * 0x9E3779B97F4A7C15ull + 17u);
    poly = qcd::PowerSeries::constant(qcd::cx(1.0), degree);
    for (int i = 0; i < degree; ++i) {
      const double rad = rng.uniform(1.15, 3.0);
      const double ang = rng.uniform(0.0, 2.0 * qcd::kPi);
      const qcd::cx root = rad * qcd::cx(std::cos(ang), std::sin(ang));
      qcd::PowerSeries factor(std::vector<qcd::cx>{qcd::cx(1.0), -qcd::cx(1.0) / root});
      poly = poly * factor.extended(degree);
    }
    poly = (0.9 / qcd::bergman_norm(poly, 2.0).value) * poly;
  }
  const auto rep = qcd::bergman_perturb(poly, eps);
  const double before2 = rep.norm_before * rep.norm_before;
  const double after2 = rep.norm_after * rep.norm_after;
  nlohmann::json j{{"spec_version", qcd::kSpecVersion},
                   {"degree", poly.degree()},
                   {"eps", eps},
                   {"norm_before", rep.norm_before},
                   {"norm_after", rep.norm_after},
                   {"norm_before_sq", before2},
                   {"norm_after_sq", after2},
                   {"strict_decrease", after2 < before2 || eps == 0.0},
                   {"zero_free", rep.zero_free},
                   {"perturbed", qcd::to_json(rep.perturbed)}};
  write_output(out, j.dump(2));
  const bool ok = rep.zero_free && (eps == 0.0 || after2 < before2);
  return ok ? kExitOk : kExitContract;
}

int cmd_parseval(const std::vector<double>& p_grid, int tail_cutoff, const std::string& out,
                 const std::string& format) {
  if (p_grid.empty()) throw qcd::PreconditionError("parseval: empty p grid");
  struct Row {
    double p, c1_sq, tail_sq, h2, hp;
    bool holds, below_two;
  };
  std::vector<Row> rows;
  for (double p : p_grid) {
    const auto rep = qcd::parseval_comparison(p, tail_cutoff);
    rows.push_back(Row{p, rep.c1_sq, rep.tail_sq, rep.h2_norm, rep.hp_norm,
                       rep.inequality_holds, p < 2.0});
  }
  std::string payload;
  if (format == "csv") {
    std::ostringstream os;
    os << "# qcdeform parseval v" << qcd::kSpecVersion << "\n";
    os << "p,c1_sq,tail_sq,holds,h2_norm,hp_norm,h2_exceeds_hp\n";
    os.precision(17);
    for (const auto& r : rows)
      os << r.p << "," << r.c1_sq << "," << r.tail_sq << "," << (r.holds ? 1 : 0) << ","
         << r.h2 << "," << r.hp << "," << (r.h2 > r.hp ? 1 : 0) << "\n";
    payload = os.str();
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row{{"p", r.p},           {"c1_sq", r.c1_sq}, {"tail_sq", r.tail_sq},
                         {"holds", r.holds},   {"h2_norm", r.h2},  {"hp_norm", r.hp},
                         {"h2_exceeds_hp", r.h2 > r.hp}};
      if (r.below_two)
        row["note"] = "p < 2: Parseval route unavailable, H2 norm exceeds Hp norm";
      arr.push_back(row);
    }
    payload = nlohmann::json{{"spec_version", qcd::kSpecVersion}, {"rows", arr}}.dump(2);
  }
  write_output(out, payload);
  for (const auto& r : rows)
    if (r.p >= 2.0 && !r.holds) return kExitContract;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasiconformal deformation toolkit for nonvanishing Hardy-space functions"};
  app.require_subcommand(1);

  std::string out_path;
  std::string format = "json";
  app.add_option("--out", out_path, "output file (stdout when absent)");
  app.add_option("--format", format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // kappa
  auto* kappa = app.add_subcommand("kappa", "extremal function coefficients and bound margin");
  kappa->fallthrough();
  int k_n = 1;
  double k_p = 2.0;
  int k_degree = 64;
  kappa->add_option("--n", k_n, "coefficient index");
  kappa->add_option("--p", k_p, "Hardy exponent");
  kappa->add_option("--degree", k_degree, "truncation degree");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "random nonvanishing sweep against the bound");
  sweep->fallthrough();
  std::vector<double> s_p{2.0, 2.5, 4.0};
  std::vector<int> s_n{2, 3, 5};
  int s_count = 100;
  std::uint64_t s_seed = 1;
  sweep->add_option("--p", s_p, "Hardy exponents");
  sweep->add_option("--n", s_n, "coefficient indices");
  sweep->add_option("--count", s_count, "samples per (n,p) cell");
  sweep->add_option("--seed", s_seed, "base seed");

  // deform
  auto* deform = app.add_subcommand("deform", "coefficient-targeting deformation");
  deform->fallthrough();
  std::uint64_t d_seed = 7;
  double d_p = 2.0;
  int d_n = 3;
  double d_eps = 1e-3;
  double d_tol = 0.0;
  double d_R = 0.0;
  double d_corrupt = 0.0;
  std::string d_config;
  deform->add_option("--seed", d_seed, "sample seed for f");
  deform->add_option("--p", d_p, "Hardy exponent");
  deform->add_option("--n", d_n, "highest targeted index");
  deform->add_option("--eps", d_eps, "imaginary shift applied to c_n");
  deform->add_option("--tol", d_tol, "Newton tolerance override");
  deform->add_option("--R", d_R, "annulus inner radius override");
  deform->add_option("--config", d_config, "JSON problem description (overrides flags)");
  deform->add_option("--corrupt-tau", d_corrupt,
                     "diagnostic: perturb the solved tau before verification");

  // bergman-demo
  auto* bergman = app.add_subcommand("bergman-demo", "zero-free norm-decreasing perturbation");
  bergman->fallthrough();
  int b_degree = 0;
  double b_eps = 0.1;
  std::uint64_t b_seed = 0;
  bool b_use_seed = false;
  bergman->add_option("--N", b_degree, "polynomial degree");
  bergman->add_option("--eps", b_eps, "perturbation size");
  bergman->add_option("--seed", b_seed, "random zero-free polynomial seed")
      ->each([&](const std::string&) { b_use_seed = true; });

  // parseval
  auto* parseval = app.add_subcommand("parseval", "coefficient-energy comparison table");
  parseval->fallthrough();
  std::vector<double> pv_grid;
  int pv_cutoff = 128;
  parseval->add_option("--p-grid", pv_grid, "exponents to tabulate");
  parseval->add_option("--cutoff", pv_cutoff, "tail cutoff N");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }

  try {
    if (kappa->parsed()) {
      if (k_p <= 1.0) throw qcd::DomainError("kappa: requires p > 1");
      return cmd_kappa(k_n, k_p, k_degree, out_path, format);
    }
    if (sweep->parsed()) return cmd_sweep(s_p, s_n, s_count, s_seed, out_path);
    if (deform->parsed())
      return cmd_deform(d_seed, d_p, d_n, d_eps, d_tol, d_R, d_corrupt, d_config, out_path);
    if (bergman->parsed()) return cmd_bergman_demo(b_degree, b_eps, b_seed, b_use_seed, out_path);
    if (parseval->parsed()) return cmd_parseval(pv_grid, pv_cutoff, out_path, format);
  } catch (const qcd::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const qcd::ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const qcd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return kExitOk;
}
