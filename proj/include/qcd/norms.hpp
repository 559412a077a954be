#pragma once

#include <cmath>
#include <vector>

#include "qcd/detail/gauss.hpp"
#include "qcd/series.hpp"

namespace qcd {

inline constexpr int kDefaultAngularNodes = 4096;
inline constexpr int kDefaultRadialNodes = 64;

struct NormReport {
  double value = 0.0;
  double p = 0.0;          // exponent; meaningless when is_bloch
  bool is_bloch = false;   // hyperbolic sup-norm tag
  int quadrature_points = 0;
  double estimated_error = 0.0;
};

namespace detail_norms {

// Angular mean of |f|^p on |z| = r over m uniform nodes.  The uniform
// (trapezoidal) rule is spectrally accurate for these integrands and exact
// for trigonometric polynomials of degree < m.
inline double angular_mean_abs_pow(const PowerSeries& f, double p, double r, int m) {
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    const double a = std::abs(eval(f, r * cx(std::cos(th), std::sin(th))));
    acc += (p == 2.0) ? a * a : std::pow(a, p);
  }
  return acc / m;
}

}  // namespace detail_norms

// Hardy norm ((1/2pi) int |f(r e^{i t})|^p dt)^{1/p}; at r = 1 this is the
// H^p norm of the truncated series.
inline NormReport hardy_norm(const PowerSeries& f, double p, double r,
                             int angular_nodes = kDefaultAngularNodes) {
  if (p < 1.0) throw DomainError("hardy_norm: unsupported exponent p < 1");
  if (!(r > 0.0) || r > 1.0)
    throw PreconditionError("hardy_norm: radius must lie in (0,1]");
  int m = angular_nodes;
  if (m < 2 * (f.degree() + 1)) m = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * (f.degree() + 1))));
  const double full = detail_norms::angular_mean_abs_pow(f, p, r, m);
  const double half = detail_norms::angular_mean_abs_pow(f, p, r, m / 2);
  NormReport rep;
  rep.value = std::pow(full, 1.0 / p);
  rep.p = p;
  rep.quadrature_points = m;
  rep.estimated_error = std::abs(rep.value - std::pow(half, 1.0 / p));
  return rep;
}

// M_f(r)^p profile over increasing radii; the subharmonicity diagnostics
// (monotone, log-convex in log r) live in the helpers below.
inline std::vector<double> mean_function_profile(const PowerSeries& f, double p,
                                                 const std::vector<double>& radii,
                                                 int angular_nodes = kDefaultAngularNodes) {
  if (p < 1.0) throw DomainError("mean_function_profile: unsupported exponent p < 1");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || radii[i] > 1.0)
      throw PreconditionError("mean_function_profile: radii must lie in (0,1]");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw PreconditionError("mean_function_profile: radii must be strictly increasing");
  }
  std::vector<double> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    out[i] = detail_norms::angular_mean_abs_pow(f, p, radii[i], angular_nodes);
  return out;
}

inline bool profile_is_nondecreasing(const std::vector<double>& values, double tol = 1e-12) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[i - 1] - tol) return false;
  return true;
}

// Worst convexity defect of log M^p against log r (slope monotonicity over
// consecutive triples).  Nonnegative up to tolerance for subharmonic means.
inline double log_convexity_defect(const std::vector<double>& radii,
                                   const std::vector<double>& values) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 2 < radii.size(); ++i) {
    const double x1 = std::log(radii[i]), x2 = std::log(radii[i + 1]), x3 = std::log(radii[i + 2]);
    const double y1 = std::log(values[i]), y2 = std::log(values[i + 1]), y3 = std::log(values[i + 2]);
    const double left = (y2 - y1) / (x2 - x1);
    const double right = (y3 - y2) / (x3 - x2);
    worst = std::min(worst, right - left);
  }
  return worst;  // >= -tol expected
}

// Bergman norm ((1/pi) iint_D |f|^p dA)^{1/p}.  p = 2 uses the exact
// coefficient identity sum |c_n|^2/(n+1); other exponents go through
// radial Gauss-Legendre x angular trapezoid quadrature.
inline NormReport bergman_norm_quadrature(const PowerSeries& f, double p,
                                          int radial_nodes = kDefaultRadialNodes,
                                          int angular_nodes = kDefaultAngularNodes) {
  if (p < 1.0) throw DomainError("bergman_norm: unsupported exponent p < 1");
  const auto compute = [&](int nr, int na) {
    const auto rule = detail::gauss_legendre(nr, 0.0, 1.0);
    double acc = 0.0;
    for (int i = 0; i < nr; ++i)
      acc += rule.weights[i] * rule.nodes[i] *
             detail_norms::angular_mean_abs_pow(f, p, rule.nodes[i], na);
    return 2.0 * acc;  // (1/pi) * (2 pi) * int r * mean dr
  };
  const double full = compute(radial_nodes, angular_nodes);
  const double half = compute(radial_nodes / 2, angular_nodes / 2);
  NormReport rep;
  rep.value = std::pow(full, 1.0 / p);
  rep.p = p;
  rep.quadrature_points = radial_nodes * angular_nodes;
  rep.estimated_error = std::abs(rep.value - std::pow(half, 1.0 / p));
  return rep;
}

inline NormReport bergman_norm(const PowerSeries& f, double p,
                               int radial_nodes = kDefaultRadialNodes,
                               int angular_nodes = kDefaultAngularNodes) {
  if (p < 1.0) throw DomainError("bergman_norm: unsupported exponent p < 1");
  if (p == 2.0) {
    double s = 0.0;
    for (int k = 0; k <= f.degree(); ++k) {
      const double a = std::abs(f.coeff(k));
      s += a * a / (k + 1);
    }
    NormReport rep;
    rep.value = std::sqrt(s);
    rep.p = 2.0;
    rep.quadrature_points = 0;  // exact coefficient path
    rep.estimated_error = 0.0;
    return rep;
  }
  return bergman_norm_quadrature(f, p, radial_nodes, angular_nodes);
}

// sup_D (1-|z|^2)^2 |phi(z)| over a polar grid with golden-section
// refinement near the argmax.  The value is a certified lower bound; the
// error estimate comes from the grid modulus of continuity at the argmax.
inline NormReport bloch_norm(const PowerSeries& phi, int radial_nodes = 200,
                             int angular_nodes = 256) {
  const auto weight_at = [&](double r, double th) {
    const double w = 1.0 - r * r;
    return w * w * std::abs(eval(phi, r * cx(std::cos(th), std::sin(th))));
  };
  double best = 0.0, best_r = 0.0, best_th = 0.0;
  double neighbor_gap = 0.0;
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(radial_nodes),
                                        std::vector<double>(static_cast<std::size_t>(angular_nodes)));
  for (int i = 0; i < radial_nodes; ++i) {
    const double r = static_cast<double>(i) / radial_nodes;  // [0, 1)
    for (int j = 0; j < angular_nodes; ++j) {
      const double th = 2.0 * kPi * j / angular_nodes;
      grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = weight_at(r, th);
      if (grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > best) {
        best = grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        best_r = r;
        best_th = th;
      }
    }
  }
  // modulus-of-continuity estimate: worst neighbor difference at the argmax
  const int bi = static_cast<int>(best_r * radial_nodes + 0.5);
  const int bj = static_cast<int>(best_th / (2.0 * kPi) * angular_nodes + 0.5) % angular_nodes;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj) {
      const int i = bi + di;
      const int j = (bj + dj + angular_nodes) % angular_nodes;
      if (i < 0 || i >= radial_nodes) continue;
      neighbor_gap = std::max(neighbor_gap,
                              std::abs(best - grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]));
    }
  // golden-section refinement, radius and angle alternately
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double r_lo = std::max(0.0, best_r - 2.0 / radial_nodes);
  double r_hi = std::min(1.0 - 1e-9, best_r + 2.0 / radial_nodes);
  double th_lo = best_th - 2.0 * (2.0 * kPi / angular_nodes);
  double th_hi = best_th + 2.0 * (2.0 * kPi / angular_nodes);
  double r = best_r, th = best_th;
  for (int round = 0; round < 3; ++round) {
    double a = r_lo, b = r_hi;
    for (int it = 0; it < 40; ++it) {
      const double c = b - gr * (b - a), d = a + gr * (b - a);
      if (weight_at(c, th) > weight_at(d, th)) b = d; else a = c;
    }
    r = 0.5 * (a + b);
    a = th_lo; b = th_hi;
    for (int it = 0; it < 40; ++it) {
      const double c = b - gr * (b - a), d = a + gr * (b - a);
      if (weight_at(r, c) > weight_at(r, d)) b = d; else a = c;
    }
    th = 0.5 * (a + b);
    best = std::max(best, weight_at(r, th));
  }
  NormReport rep;
  rep.value = best;
  rep.is_bloch = true;
  rep.quadrature_points = radial_nodes * angular_nodes;
  rep.estimated_error = neighbor_gap;
  return rep;
}

struct EmbeddingReport {
  bool in_ball = false;  // hardy < 2^{-1/p}
  double hardy = 0.0;
  double bloch = 0.0;
};

// Tested contract: hardy < 2^{-1/p} implies bloch < 2 (one direction only).
inline EmbeddingReport embedding_check(const PowerSeries& f, double p) {
  if (p < 1.0) throw DomainError("embedding_check: unsupported exponent p < 1");
  EmbeddingReport rep;
  rep.hardy = hardy_norm(f, p, 1.0).value;
  rep.bloch = bloch_norm(f).value;
  rep.in_ball = rep.hardy < std::pow(2.0, -1.0 / p);
  return rep;
}

}  // namespace qcd
