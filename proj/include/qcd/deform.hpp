#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qcd/detail/linalg.hpp"
#include "qcd/integral_ops.hpp"
#include "qcd/norms.hpp"
#include "qcd/series.hpp"

namespace qcd {

// ---------------------------------------------------------------------------
// Coefficient-targeting deformation: given a bounded nonvanishing f and
// shifts d_0..d_n, find a Beltrami coefficient of the ansatz
//     mu = sum_k xi_k conj(phi_k) + tau conj(psi)
// whose map h = id + T rho composes with f to hit the targets while holding
// the area p-norm, then verify every contract on the actual composition.
// ---------------------------------------------------------------------------

struct DeformationTolerances {
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  double neumann_tol = 1e-13;
  int neumann_kmax = 64;
  double mu_sup_cap = 0.1;     // policy cap, well under the theoretical < 1
  int psi_order = 24;          // expansion order K of the phi tail
  int area_radial_nodes = 48;  // area-functional quadrature
  int area_angular_nodes = 1024;
  int map_series_order = 96;   // Taylor order of T rho kept on D_0
};

struct DeformationProblem {
  PowerSeries f;
  double p = 2.0;
  int n = 1;
  std::vector<cx> d;       // targeted shifts d_0..d_n (entries below first_index must be 0)
  double a = 0.0;          // target change of the area p-norm
  double eps_budget = 1e-2;
  int first_index = 0;     // j; 0 targets the full vector, j > 0 is the gap variant
  double annulus_R = 0.0;  // 0 -> smallest admissible radius
};

struct DeformationDiagnostics {
  std::vector<double> coeff_residuals;  // |c_k(f*) - c_k(f) - d_k|, k = j..n
  double area_norm_delta = 0.0;         // achieved (1/pi) iint |f*|^p - |f|^p
  double hardy_norm_delta = 0.0;        // achieved ||f*||_p^p - ||f||_p^p
  int newton_iterations = 0;
  int jacobian_refreshes = 0;
  double mu_sup_norm = 0.0;
  int neumann_iterations = 0;
  double neumann_residual = 0.0;
  double beltrami_residual = 0.0;
  double conformal_residual = 0.0;
  double omega_sup = 0.0;
};

struct DeformationResult {
  std::vector<cx> xi;  // xi_j..xi_n
  double tau = 0.0;
  LaurentDensity mu;
  MapRepresentation map;
  PowerSeries f_star;
  bool converged = false;
  DeformationDiagnostics diagnostics;

  DeformationResult(LaurentDensity m, MapRepresentation mp, PowerSeries fs)
      : mu(std::move(m)), map(std::move(mp)), f_star(std::move(fs)) {}
};

// Context assembled once per problem: annulus, the phi expansion, Gram
// constants, and the composition data entering the first-order Jacobian.
struct DeformationContext {
  AnnulusSpec annulus{cx(0.0), 2.0};
  PhiData phi{AnnulusSpec{cx(0.0), 2.0}};
  std::vector<double> r2;       // gram_r2(k) for k = 0..K
  std::vector<int> psi_active;  // indices of psi with |b_k| above threshold
  double kappa_response = 0.0;  // (2/pi) sum |b_k|^2 r_k^2 over psi_active
  std::vector<std::vector<cx>> g_power_coeffs;  // [m][k] = coeff_k of (f - c0)^m
  double sup_f = 0.0;
  int dim = 0;
};

namespace detail_deform {

inline double euclidean(const std::vector<cx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

inline double boundary_sup(const PowerSeries& f, int m = 1024) {
  double sup = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    sup = std::max(sup, std::abs(eval(f, cx(std::cos(th), std::sin(th)))));
  }
  return sup;
}

// (1/pi) iint_D (|F o f|^p - |f|^p) evaluated pointwise through the solved
// map, so no series truncation enters the area functional.
inline double area_delta_pointwise(const PowerSeries& f, const MapRepresentation& map,
                                   double p, int radial, int angular) {
  const auto rule = detail::gauss_legendre(radial, 0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double r = rule.nodes[i];
    const double w = rule.weights[i] * r * (2.0 / angular);  // (1/pi)(2 pi / M)
    double ang = 0.0;
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * kPi * j / angular;
      const cx fv = eval(f, r * cx(std::cos(th), std::sin(th)));
      const cx gv = map.eval(fv);
      const double ap = (p == 2.0) ? std::norm(fv) : std::pow(std::abs(fv), p);
      const double bp = (p == 2.0) ? std::norm(gv) : std::pow(std::abs(gv), p);
      ang += bp - ap;
    }
    acc += w * ang;
  }
  return acc;
}

}  // namespace detail_deform

inline void validate_problem(const DeformationProblem& problem) {
  if (!(problem.p > 1.0)) throw DomainError("deform: requires p > 1");
  if (problem.n < 1) throw PreconditionError("deform: n must be >= 1");
  if (static_cast<int>(problem.d.size()) != problem.n + 1)
    throw PreconditionError("deform: d must have n+1 entries");
  if (problem.first_index < 0 || problem.first_index > problem.n)
    throw PreconditionError("deform: first_index out of range");
  for (int k = 0; k < problem.first_index; ++k)
    if (std::abs(problem.d[static_cast<std::size_t>(k)]) != 0.0)
      throw PreconditionError("deform: gap variant cannot target indices below first_index");
  const double dnorm = detail_deform::euclidean(problem.d);
  if (dnorm > problem.eps_budget || std::abs(problem.a) > problem.eps_budget)
    throw BudgetError("deform: targets exceed the eps budget");
  bool has_high = false;
  for (int k = problem.n + 1; k <= problem.f.degree(); ++k)
    if (std::abs(problem.f.coeff(k)) > 1e-12) has_high = true;
  if (!has_high)
    throw PreconditionError("deform: f must not be a polynomial of degree <= n");
  if (problem.first_index == 0) {
    const auto rep = is_nonvanishing(problem.f, 0.999);
    if (!rep.nonvanishing)
      throw PreconditionError("deform: f must be nonvanishing on the disk");
  }
}

inline DeformationContext make_context(const DeformationProblem& problem,
                                       const DeformationTolerances& tols = {}) {
  validate_problem(problem);
  DeformationContext ctx;
  ctx.sup_f = detail_deform::boundary_sup(problem.f);
  const cx center = problem.f.coeff(0);
  const double min_R = ctx.sup_f + std::abs(center) + 1.0;
  const double R = problem.annulus_R > 0.0 ? problem.annulus_R : min_R;
  if (R < min_R - 1e-12)
    throw PreconditionError("deform: annulus radius below sup|f| + |c0| + 1");
  ctx.annulus = AnnulusSpec(center, R);
  ctx.phi = phi_functional(problem.f, problem.p, ctx.annulus, problem.n, tols.psi_order,
                           problem.first_index);
  const int K = tols.psi_order;
  ctx.r2.resize(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) ctx.r2[static_cast<std::size_t>(k)] = gram_r2(k, ctx.annulus);

  if (std::abs(ctx.phi.b[static_cast<std::size_t>(problem.first_index)]) < 1e-12)
    throw StructureError("deform: b_j vanishes; f is outside the admissible class");

  for (int k = 0; k <= K; ++k) {
    if (k >= problem.first_index && k <= problem.n) continue;
    if (std::abs(ctx.phi.b[static_cast<std::size_t>(k)]) > 1e-12) ctx.psi_active.push_back(k);
  }
  if (ctx.psi_active.empty())
    throw StructureError("deform: psi tail is empty; no norm-control direction");
  for (int k : ctx.psi_active)
    ctx.kappa_response += std::norm(ctx.phi.b[static_cast<std::size_t>(k)]) *
                          ctx.r2[static_cast<std::size_t>(k)];
  ctx.kappa_response *= 2.0 / kPi;

  // composition data (f - c0)^m truncated at degree n, m = 0..n
  const int n = problem.n;
  PowerSeries g = (problem.f - PowerSeries::constant(center, problem.f.degree())).truncated(n);
  ctx.g_power_coeffs.assign(static_cast<std::size_t>(n) + 1, {});
  PowerSeries gp = PowerSeries::constant(cx(1.0), n);
  for (int m = 0; m <= n; ++m) {
    ctx.g_power_coeffs[static_cast<std::size_t>(m)] = gp.coeffs();
    gp = gp * g;
  }
  ctx.dim = 2 * (n - problem.first_index) + 3;
  return ctx;
}

// mu = sum_k xi_k conj(phi_k) + tau conj(psi), supported on the annulus.
inline LaurentDensity ansatz_mu(const std::vector<cx>& xi, double tau,
                                const DeformationContext& ctx, int first_index,
                                double sup_cap = 0.1) {
  LaurentDensity mu(ctx.annulus);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    const int k = first_index + static_cast<int>(i);
    mu.add(0, -k - 1, xi[i]);
  }
  if (tau != 0.0) mu = mu + ctx.phi.psi.conjugated() * cx(tau);
  const double sup = mu.sup_norm();
  if (sup >= sup_cap)
    throw BudgetError("ansatz_mu: ||mu||_inf = " + std::to_string(sup) +
                      " exceeds the policy cap");
  return mu;
}

// Target vector y = (Re d_j, Im d_j, ..., Re d_n, Im d_n, a).  In the gap
// variant the d_j slot is repurposed as the orthogonality constraint row
// (target 0), which keeps the dimension 2(n-j)+3 in both modes.
inline std::vector<double> assemble_targets(const DeformationProblem& problem) {
  std::vector<double> y;
  y.reserve(2 * (problem.n - problem.first_index) + 3);
  if (problem.first_index > 0) {
    y.push_back(0.0);
    y.push_back(0.0);
  } else {
    y.push_back(problem.d[0].real());
    y.push_back(problem.d[0].imag());
  }
  for (int k = std::max(problem.first_index + 1, 1); k <= problem.n; ++k) {
    y.push_back(problem.d[static_cast<std::size_t>(k)].real());
    y.push_back(problem.d[static_cast<std::size_t>(k)].imag());
  }
  y.push_back(problem.a);
  return y;
}

struct ForwardArtifacts {
  LaurentDensity mu;
  NeumannResult neumann;
  std::optional<MapRepresentation> map;
  PowerSeries f_star;

  explicit ForwardArtifacts(const AnnulusSpec& an)
      : mu(an), neumann{LaurentDensity(an), 0, false, 0.0} {}
};

// Compose the solved map with f at series level.  Coefficients 0..N of the
// result are exact: g = f - c0 vanishes at the origin, so coefficient k only
// sees Taylor data t_0..t_k.
inline PowerSeries compose_map_series(const PowerSeries& f, const MapRepresentation& map) {
  const int N = f.degree();
  const PowerSeries g = f - PowerSeries::constant(map.annulus.center, N);
  const auto& t = map.disk_coeffs;
  int top = static_cast<int>(t.size()) - 1;
  while (top > 0 && std::abs(t[static_cast<std::size_t>(top)]) < 1e-300) --top;
  PowerSeries acc = PowerSeries::constant(t.empty() ? cx(0.0) : t[static_cast<std::size_t>(top)], N);
  for (int k = top - 1; k >= 0; --k)
    acc = acc * g + PowerSeries::constant(t[static_cast<std::size_t>(k)], N);
  return f + acc;
}

// The nonlinear map W: (xi, tau) -> achieved (coefficient shifts, area
// delta).  Full pipeline on every call: ansatz, Neumann series, map, series
// composition, area quadrature.  No linearization shortcuts.
inline std::vector<double> forward_map_W(const std::vector<double>& x,
                                         const DeformationProblem& problem,
                                         const DeformationContext& ctx,
                                         const DeformationTolerances& tols,
                                         ForwardArtifacts* artifacts = nullptr) {
  const int j = problem.first_index;
  const int n = problem.n;
  if (static_cast<int>(x.size()) != ctx.dim)
    throw PreconditionError("forward_map_W: wrong unknown dimension");
  std::vector<cx> xi(static_cast<std::size_t>(n - j) + 1);
  for (int i = 0; i <= n - j; ++i)
    xi[static_cast<std::size_t>(i)] = cx(x[static_cast<std::size_t>(2 * i)],
                                         x[static_cast<std::size_t>(2 * i + 1)]);
  const double tau = x.back();

  const LaurentDensity mu = ansatz_mu(xi, tau, ctx, j, tols.mu_sup_cap);
  const NeumannResult neumann = neumann_solve(mu, tols.neumann_tol, tols.neumann_kmax);
  if (!neumann.converged)
    throw ConvergenceError("forward_map_W: Neumann series did not converge (residual " +
                           std::to_string(neumann.residual) + ")");
  MapRepresentation map = build_map(neumann, mu, ctx.annulus, tols.neumann_tol * 100,
                                    tols.map_series_order);
  const PowerSeries f_star = compose_map_series(problem.f, map);

  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(ctx.dim));
  if (j > 0) {
    // orthogonality constraint row: sum xi_k b_k r_k^2 = 0
    cx c(0.0);
    for (int k = j; k <= n; ++k)
      c += xi[static_cast<std::size_t>(k - j)] * ctx.phi.b[static_cast<std::size_t>(k)] *
           ctx.r2[static_cast<std::size_t>(k)];
    y.push_back(c.real());
    y.push_back(c.imag());
  } else {
    const cx s0 = f_star.coeff(0) - problem.f.coeff(0);
    y.push_back(s0.real());
    y.push_back(s0.imag());
  }
  for (int k = std::max(j + 1, 1); k <= n; ++k) {
    const cx s = f_star.coeff(k) - problem.f.coeff(k);
    y.push_back(s.real());
    y.push_back(s.imag());
  }
  y.push_back(detail_deform::area_delta_pointwise(problem.f, map, problem.p,
                                                  tols.area_radial_nodes,
                                                  tols.area_angular_nodes));
  if (artifacts) {
    artifacts->mu = mu;
    artifacts->neumann = neumann;
    artifacts->map.emplace(std::move(map));
    artifacts->f_star = f_star;
  }
  return y;
}

namespace detail_deform {

// Exact first-order Jacobian of W at the origin.  Coefficient rows couple
// through the powers of g = f - c0 (the composition is triangular in the
// Taylor data t_m = -xi_m r_m^2); the area row carries the pairing gradient
// and the tau response -kappa.
inline detail::Matrix initial_jacobian(const DeformationProblem& problem,
                                       const DeformationContext& ctx) {
  const int j = problem.first_index;
  const int n = problem.n;
  const int dim = ctx.dim;
  detail::Matrix J(dim, dim);
  const auto block = [&](int row2, int col2, cx dvalue) {
    J(row2, col2) = dvalue.real();
    J(row2, col2 + 1) = -dvalue.imag();
    J(row2 + 1, col2) = dvalue.imag();
    J(row2 + 1, col2 + 1) = dvalue.real();
  };

  int row = 0;
  if (j > 0) {
    for (int m = j; m <= n; ++m)
      block(row, 2 * (m - j),
            ctx.phi.b[static_cast<std::size_t>(m)] * ctx.r2[static_cast<std::size_t>(m)]);
    row += 2;
  } else {
    // shift_0 = t_0 = -xi_0 r_0^2
    block(row, 0, cx(-ctx.r2[0]));
    row += 2;
  }
  for (int k = std::max(j + 1, 1); k <= n; ++k) {
    for (int m = j; m <= std::min(k, n); ++m) {
      if (m == 0 && k > 0) continue;  // [g^0]_k = 0 for k > 0
      const cx gmk = ctx.g_power_coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
      block(row, 2 * (m - j), -ctx.r2[static_cast<std::size_t>(m)] * gmk);
    }
    // tau column: psi parts with index m <= n exist only in the gap variant
    cx dtau(0.0);
    for (int m : ctx.psi_active) {
      if (m > k) continue;
      if (m == 0 && k > 0) continue;
      const cx gmk = ctx.g_power_coeffs[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
      dtau += std::conj(ctx.phi.b[static_cast<std::size_t>(m)]) *
              (-ctx.r2[static_cast<std::size_t>(m)]) * gmk;
    }
    J(row, dim - 1) = dtau.real();
    J(row + 1, dim - 1) = dtau.imag();
    row += 2;
  }
  // area row
  for (int m = j; m <= n; ++m) {
    const cx grad = -(2.0 / kPi) * ctx.phi.b[static_cast<std::size_t>(m)] *
                    ctx.r2[static_cast<std::size_t>(m)];
    J(dim - 1, 2 * (m - j)) = grad.real();
    J(dim - 1, 2 * (m - j) + 1) = -grad.imag();
  }
  J(dim - 1, dim - 1) = -ctx.kappa_response;
  return J;
}

inline detail::Matrix fd_jacobian(const std::vector<double>& x,
                                  const DeformationProblem& problem,
                                  const DeformationContext& ctx,
                                  const DeformationTolerances& tols,
                                  const std::vector<double>& fx) {
  const int dim = ctx.dim;
  detail::Matrix J(dim, dim);
  const double step = 1e-6 * std::max(1.0, std::sqrt(std::inner_product(
                                              x.begin(), x.end(), x.begin(), 0.0)));
  for (int c = 0; c < dim; ++c) {
    std::vector<double> xp = x;
    xp[static_cast<std::size_t>(c)] += step;
    const auto fp = forward_map_W(xp, problem, ctx, tols);
    for (int r = 0; r < dim; ++r)
      J(r, c) = (fp[static_cast<std::size_t>(r)] - fx[static_cast<std::size_t>(r)]) / step;
  }
  return J;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail_deform

// Convergence splits by row character.  The coefficient rows are strong
// directions of W and are driven to newton_tol.  The area row responds only
// through the weak psi tail; driving it below its O(eps^2) contract would
// require Beltrami coefficients far above the policy cap, so the tau step
// is clamped to the admissible budget and the row converges to area_tol.
inline DeformationResult newton_deform(const DeformationProblem& problem,
                                       const DeformationTolerances& tols = {}) {
  const DeformationContext ctx = make_context(problem, tols);
  const std::vector<double> y = assemble_targets(problem);
  const int dim = ctx.dim;
  const double eps_scale =
      std::max(detail_deform::euclidean(problem.d), std::abs(problem.a));
  const double area_tol = std::max(tols.newton_tol, 8.0 * eps_scale * eps_scale);
  const double psi_sup = ctx.phi.psi.sup_norm();

  const auto row_resid = [&](const std::vector<double>& fx) {
    double coeff = 0.0;
    for (int i = 0; i + 1 < dim; ++i)
      coeff = std::max(coeff, std::abs(fx[static_cast<std::size_t>(i)] -
                                       y[static_cast<std::size_t>(i)]));
    const double area = std::abs(fx[static_cast<std::size_t>(dim - 1)] -
                                 y[static_cast<std::size_t>(dim - 1)]);
    return std::pair<double, double>{coeff, area};
  };
  const auto done = [&](const std::pair<double, double>& r) {
    return r.first < tols.newton_tol && r.second < area_tol;
  };

  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  detail::Matrix J = detail_deform::initial_jacobian(problem, ctx);
  int refreshes = 0;

  ForwardArtifacts artifacts(ctx.annulus);
  std::vector<double> fx = forward_map_W(x, problem, ctx, tols, &artifacts);
  auto resid = row_resid(fx);
  int iterations = 0;

  while (!done(resid) && iterations < tols.newton_max_iter) {
    std::vector<double> rhs(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
      rhs[static_cast<std::size_t>(i)] = fx[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
    const auto step = detail::solve_dense(J, rhs);
    for (int i = 0; i < dim; ++i) x[static_cast<std::size_t>(i)] -= step[static_cast<std::size_t>(i)];

    // clamp tau to the Beltrami budget left over by the fraction part
    {
      std::vector<cx> xi(static_cast<std::size_t>((dim - 1) / 2));
      for (std::size_t i = 0; i < xi.size(); ++i)
        xi[i] = cx(x[2 * i], x[2 * i + 1]);
      const LaurentDensity xi_part =
          ansatz_mu(xi, 0.0, ctx, problem.first_index, 1e300);
      const double xi_sup = xi_part.sup_norm();
      if (xi_sup >= 0.92 * tols.mu_sup_cap)
        throw BudgetError("newton_deform: fraction part alone needs ||mu|| = " +
                          std::to_string(xi_sup) + ", above the policy cap");
      const double tau_cap = (0.92 * tols.mu_sup_cap - xi_sup) / std::max(psi_sup, 1e-300);
      if (std::abs(x[static_cast<std::size_t>(dim - 1)]) > tau_cap)
        x[static_cast<std::size_t>(dim - 1)] =
            x[static_cast<std::size_t>(dim - 1)] > 0 ? tau_cap : -tau_cap;
    }

    const auto prev = resid;
    fx = forward_map_W(x, problem, ctx, tols, &artifacts);
    ++iterations;
    resid = row_resid(fx);
    if (!done(resid) && resid.first > 0.5 * prev.first && resid.first >= tols.newton_tol) {
      J = detail_deform::fd_jacobian(x, problem, ctx, tols, fx);
      ++refreshes;
    }
  }
  if (!done(resid))
    throw ConvergenceError("newton_deform: residuals (coeff " + std::to_string(resid.first) +
                           ", area " + std::to_string(resid.second) + ") after " +
                           std::to_string(iterations) + " iterations");

  DeformationResult result(artifacts.mu, std::move(*artifacts.map), artifacts.f_star);
  result.converged = true;
  const int j = problem.first_index;
  result.xi.resize(static_cast<std::size_t>(problem.n - j) + 1);
  for (int i = 0; i <= problem.n - j; ++i)
    result.xi[static_cast<std::size_t>(i)] =
        cx(x[static_cast<std::size_t>(2 * i)], x[static_cast<std::size_t>(2 * i + 1)]);
  result.tau = x.back();

  auto& diag = result.diagnostics;
  diag.newton_iterations = iterations;
  diag.jacobian_refreshes = refreshes;
  diag.mu_sup_norm = result.mu.sup_norm();
  diag.neumann_iterations = artifacts.neumann.iterations;
  diag.neumann_residual = artifacts.neumann.residual;
  diag.beltrami_residual = result.map.residuals.beltrami;
  diag.conformal_residual = result.map.residuals.conformal;
  diag.omega_sup = omega_sup(result.map);
  diag.area_norm_delta = fx[static_cast<std::size_t>(dim - 1)];
  for (int k = j; k <= problem.n; ++k) {
    if (j > 0 && k == j) {
      diag.coeff_residuals.push_back(0.0);  // constraint slot, not a shift target
      continue;
    }
    const cx achieved = result.f_star.coeff(k) - problem.f.coeff(k);
    diag.coeff_residuals.push_back(std::abs(achieved - problem.d[static_cast<std::size_t>(k)]));
  }
  const double before = std::pow(hardy_norm(problem.f, problem.p, 1.0).value, problem.p);
  const double after = std::pow(hardy_norm(result.f_star, problem.p, 1.0).value, problem.p);
  diag.hardy_norm_delta = after - before;
  return result;
}

// Rebuild a result from explicitly chosen (xi, tau) without solving;
// used by negative tests that corrupt one component.
inline DeformationResult rebuild_with_parameters(const DeformationProblem& problem,
                                                 const std::vector<cx>& xi, double tau,
                                                 const DeformationTolerances& tols = {}) {
  const DeformationContext ctx = make_context(problem, tols);
  std::vector<double> x;
  for (const auto& z : xi) {
    x.push_back(z.real());
    x.push_back(z.imag());
  }
  x.push_back(tau);
  ForwardArtifacts artifacts(ctx.annulus);
  const auto fx = forward_map_W(x, problem, ctx, tols, &artifacts);
  DeformationResult result(artifacts.mu, std::move(*artifacts.map), artifacts.f_star);
  result.xi = xi;
  result.tau = tau;
  result.converged = true;  // built, not solved
  result.diagnostics.mu_sup_norm = result.mu.sup_norm();
  result.diagnostics.area_norm_delta = fx.back();
  const int j = problem.first_index;
  for (int k = j; k <= problem.n; ++k) {
    if (j > 0 && k == j) {
      result.diagnostics.coeff_residuals.push_back(0.0);
      continue;
    }
    const cx achieved = result.f_star.coeff(k) - problem.f.coeff(k);
    result.diagnostics.coeff_residuals.push_back(
        std::abs(achieved - problem.d[static_cast<std::size_t>(k)]));
  }
  const double before = std::pow(hardy_norm(problem.f, problem.p, 1.0).value, problem.p);
  const double after = std::pow(hardy_norm(result.f_star, problem.p, 1.0).value, problem.p);
  result.diagnostics.hardy_norm_delta = after - before;
  return result;
}

// ---------------------------------------------------------------------------
// Post-hoc verification of the five contracts of a solved deformation.
// ---------------------------------------------------------------------------
struct ContractReport {
  bool coefficients = false;     // (1)
  bool area_norm = false;        // (2)
  bool hardy_norm = false;       // (3)
  bool conformal_on_image = false;  // (4)
  bool f_star_nonvanishing = false;  // (5)
  double worst_coeff_residual = 0.0;
  double area_defect = 0.0;
  double hardy_defect = 0.0;
  double image_dbar = 0.0;

  bool all() const {
    return coefficients && area_norm && hardy_norm && conformal_on_image &&
           f_star_nonvanishing;
  }
};

inline ContractReport verify_deformation(const DeformationResult& result,
                                         const DeformationProblem& problem,
                                         const DeformationTolerances& tols = {},
                                         bool throw_on_failure = true) {
  ContractReport rep;
  const double eps_scale =
      std::max(detail_deform::euclidean(problem.d), std::abs(problem.a));

  // (1) coefficient shifts
  rep.worst_coeff_residual = 0.0;
  for (double r : result.diagnostics.coeff_residuals)
    rep.worst_coeff_residual = std::max(rep.worst_coeff_residual, r);
  rep.coefficients = rep.worst_coeff_residual <= 10.0 * tols.newton_tol;

  // (2) area p-norm preserved to |a| + O(eps^2)
  rep.area_defect = std::abs(result.diagnostics.area_norm_delta - problem.a);
  rep.area_norm = rep.area_defect <= std::max(100.0 * tols.newton_tol, 10.0 * eps_scale * eps_scale);

  // (3) Hardy norm moves O(eps) only
  rep.hardy_defect = std::abs(result.diagnostics.hardy_norm_delta);
  rep.hardy_norm = rep.hardy_defect <= 100.0 * eps_scale + 1e-9;

  // (4) h conformal on f(D): dbar h at image points
  double worst = 0.0;
  for (int i = 0; i < 48; ++i) {
    const double th = 2.0 * kPi * i / 48.0;
    const double r = 0.25 + 0.70 * (i % 3) / 2.0;
    const cx w = eval(problem.f, r * cx(std::cos(th), std::sin(th)));
    const auto wirt = result.map.wirtinger(w, 2e-3);
    worst = std::max(worst, std::abs(wirt.first));
  }
  rep.image_dbar = worst;
  rep.conformal_on_image = worst <= 1e-9;

  // (5) f* nonvanishing (skipped in the gap variant, where f itself vanishes
  // at the origin)
  if (problem.first_index == 0)
    rep.f_star_nonvanishing = is_nonvanishing(result.f_star, 0.999).nonvanishing;
  else
    rep.f_star_nonvanishing = true;

  if (throw_on_failure && !rep.all()) {
    std::string msg = "verify_deformation failed:";
    int first = 0;
    if (!rep.coefficients) { msg += " contract 1 (coefficient shifts)"; first = first ? first : 1; }
    if (!rep.area_norm) { msg += " contract 2 (area norm preservation)"; first = first ? first : 2; }
    if (!rep.hardy_norm) { msg += " contract 3 (Hardy norm O(eps))"; first = first ? first : 3; }
    if (!rep.conformal_on_image) { msg += " contract 4 (conformality on f(D))"; first = first ? first : 4; }
    if (!rep.f_star_nonvanishing) { msg += " contract 5 (f* zero-free)"; first = first ? first : 5; }
    throw ContractViolation(msg, first);
  }
  return rep;
}

}  // namespace qcd
