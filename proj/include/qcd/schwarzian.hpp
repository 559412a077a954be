#pragma once

#include <cmath>
#include <vector>

#include "qcd/norms.hpp"
#include "qcd/series.hpp"

namespace qcd {

// ---------------------------------------------------------------------------
// Schwarzian derivative S_w = (w''/w')' - (1/2)(w''/w')^2, its inversion
// through the linear equation 2 eta'' + phi eta = 0, the exterior inversion
// W(z) = 1/w(1/z), and the covering check for normalized families.
// ---------------------------------------------------------------------------

inline PowerSeries schwarzian_of(const PowerSeries& w) {
  if (std::abs(w.coeff(1)) == 0.0)
    throw PreconditionError("schwarzian_of: w'(0) = 0, not locally univalent");
  const PowerSeries wp = derivative(w);
  const PowerSeries wpp = derivative(wp);
  const PowerSeries ratio = divide(wpp, wp);  // degree N-2
  return derivative(ratio) - 0.5 * (ratio * ratio).truncated(std::max(ratio.degree() - 1, 0));
}

// Pole of the solved map inside the sampled disk, reported with a location.
struct SchwarzianPoleError : Error {
  SchwarzianPoleError(const std::string& what, cx where) : Error(what), location(where) {}
  cx location;
};

// Solve 2 eta'' + phi eta = 0 for the two normalized bases and return
// w = e^{i theta} eta_2 / eta_1 with w(0) = 0, w'(0) = e^{i theta}.  A zero
// of eta_1 in the sampled disk is a pole of w and is reported, not hidden.
inline PowerSeries solve_schwarzian(const PowerSeries& phi, double theta,
                                    double pole_check_radius = 0.9) {
  const int n = phi.degree() + 3;
  std::vector<cx> e1(static_cast<std::size_t>(n) + 1, cx(0.0));
  std::vector<cx> e2(static_cast<std::size_t>(n) + 1, cx(0.0));
  e1[0] = cx(1.0);
  e2[1] = cx(1.0);
  for (int k = 0; k + 2 <= n; ++k) {
    cx acc1(0.0), acc2(0.0);
    for (int i = 0; i <= k; ++i) {
      acc1 += phi.coeff(i) * e1[static_cast<std::size_t>(k - i)];
      acc2 += phi.coeff(i) * e2[static_cast<std::size_t>(k - i)];
    }
    const double denom = 2.0 * (k + 2) * (k + 1);
    e1[static_cast<std::size_t>(k + 2)] = -acc1 / denom;
    e2[static_cast<std::size_t>(k + 2)] = -acc2 / denom;
  }
  const PowerSeries eta1(std::move(e1));
  const PowerSeries eta2(std::move(e2));
  const auto pole = is_nonvanishing(eta1, pole_check_radius);
  if (!pole.nonvanishing) {
    // locate the pole roughly: minimum of |eta_1| over a polar grid
    cx where(0.0);
    double best = 1e300;
    for (int i = 1; i <= 24; ++i)
      for (int j = 0; j < 64; ++j) {
        const double r = pole_check_radius * i / 24.0;
        const double th = 2.0 * kPi * j / 64.0;
        const cx z = r * cx(std::cos(th), std::sin(th));
        const double a = std::abs(eval(eta1, z));
        if (a < best) {
          best = a;
          where = z;
        }
      }
    throw SchwarzianPoleError("solve_schwarzian: eta_1 vanishes in the disk (pole of w)", where);
  }
  const cx rot = std::polar(1.0, theta);
  return rot * divide(eta2, eta1);
}

// Exterior inversion W(z) = 1/w(1/z) = e^{-i theta} z + b_0 + b_1/z + ...
// for w = a_1 z + a_2 z^2 + ..., |a_1| = 1.  Returned as the coefficient
// sequence [e^{-i theta}, b_0, b_1, ...].
inline std::vector<cx> invert_map(const PowerSeries& w) {
  if (std::abs(w.coeff(0)) > 1e-13)
    throw PreconditionError("invert_map: w(0) must vanish");
  const cx a1 = w.coeff(1);
  if (std::abs(a1) == 0.0) throw PreconditionError("invert_map: w'(0) = 0");
  const int n = w.degree();
  // w(z) = z v(z); W(z) = z / v(1/z) = z * (1/v)(1/z)
  std::vector<cx> vc(static_cast<std::size_t>(n), cx(0.0));
  for (int k = 1; k <= n; ++k) vc[static_cast<std::size_t>(k - 1)] = w.coeff(k);
  const PowerSeries vrec = reciprocal(PowerSeries(std::move(vc)));
  std::vector<cx> out(static_cast<std::size_t>(vrec.degree()) + 1);
  for (int k = 0; k <= vrec.degree(); ++k) out[static_cast<std::size_t>(k)] = vrec.coeff(k);
  return out;  // out[0] = 1/a_1 = e^{-i theta}; out[m] = b_{m-1}
}

// Recover a_n from the exterior coefficients by the forward recursion
//   a_{t+1} = -e^{i theta} sum_{m=0}^{t-1} a_{t-m} b_m,   a_1 = e^{i theta},
// which is the coefficient identity of w(u) W(1/u) = 1 solved upward.
inline std::vector<cx> a_from_b(const std::vector<cx>& b, double theta, int n_max) {
  if (static_cast<int>(b.size()) < n_max - 1)
    throw PreconditionError("a_from_b: not enough exterior coefficients");
  std::vector<cx> a(static_cast<std::size_t>(n_max) + 1, cx(0.0));
  const cx rot = std::polar(1.0, theta);
  if (n_max >= 1) a[1] = rot;
  for (int t = 1; t < n_max; ++t) {
    cx s(0.0);
    for (int m = 0; m <= t - 1; ++m) s += a[static_cast<std::size_t>(t - m)] * b[static_cast<std::size_t>(m)];
    a[static_cast<std::size_t>(t + 1)] = -rot * s;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Rotation normalization w_{tau,theta}(z) = e^{-i theta} w(e^{i tau} z) with
// theta = arg w(e^{i tau}), the representative with a distinguished boundary
// point.  The Schwarzian transforms as S(z) -> S(e^{i tau} z) e^{2 i tau}.
// ---------------------------------------------------------------------------
struct SchwarzianPair {
  PowerSeries w;
  PowerSeries phi;  // = S_w
  double theta = 0.0;
  double tau = 0.0;
};

inline SchwarzianPair normalize_rotation(const PowerSeries& w, double tau) {
  if (std::abs(w.coeff(0)) > 1e-13 || std::abs(w.coeff(1) - cx(1.0)) > 1e-13)
    throw PreconditionError("normalize_rotation: requires w(0) = 0, w'(0) = 1");
  const cx z0 = std::polar(1.0, tau);
  const double theta = std::arg(eval(w, z0));
  std::vector<cx> c(static_cast<std::size_t>(w.degree()) + 1);
  cx rot_pow(1.0);
  const cx rot = std::polar(1.0, tau);
  const cx post = std::polar(1.0, -theta);
  for (int k = 0; k <= w.degree(); ++k) {
    c[static_cast<std::size_t>(k)] = post * rot_pow * w.coeff(k);
    rot_pow *= rot;
  }
  SchwarzianPair pair;
  pair.w = PowerSeries(std::move(c), w.sample_radius_hint());
  pair.phi = schwarzian_of(pair.w);
  pair.theta = theta;
  pair.tau = tau;
  return pair;
}

// ---------------------------------------------------------------------------
// Covering check: for a family of normalized (w(0)=0, w'(0)=1) univalent
// truncations, the image of the disk of radius eval_radius covers the disk
// of radius min |w| over that circle.  Compared against 1/(2 sup |a_2|).
// ---------------------------------------------------------------------------
struct CoveringReport {
  double a2_max = 0.0;
  double min_omitted_modulus = 0.0;  // radius certified covered (worst member)
  bool holds = false;
};

namespace detail_schwarzian {

// Necessary-condition injectivity filter: pairwise image separation on a
// coarse grid.
inline bool grid_injective(const PowerSeries& w, double radius, int nr = 12, int na = 24) {
  std::vector<cx> img;
  img.reserve(static_cast<std::size_t>(nr) * na);
  for (int i = 1; i <= nr; ++i)
    for (int j = 0; j < na; ++j) {
      const double r = radius * i / nr;
      const double th = 2.0 * kPi * j / na;
      img.push_back(eval(w, r * cx(std::cos(th), std::sin(th))));
    }
  for (std::size_t i = 0; i < img.size(); ++i)
    for (std::size_t j = i + 1; j < img.size(); ++j)
      if (std::abs(img[i] - img[j]) < 1e-9) return false;
  return true;
}

}  // namespace detail_schwarzian

inline CoveringReport covering_check(const std::vector<PowerSeries>& family,
                                     double eval_radius = 0.92, int rays = 2048) {
  CoveringReport rep;
  rep.min_omitted_modulus = 1e300;
  for (const auto& w : family) {
    if (std::abs(w.coeff(0)) > 1e-12 || std::abs(w.coeff(1) - cx(1.0)) > 1e-10)
      throw PreconditionError("covering_check: family member not normalized");
    if (!detail_schwarzian::grid_injective(w, eval_radius))
      throw PreconditionError("covering_check: family member fails the injectivity filter");
    rep.a2_max = std::max(rep.a2_max, std::abs(w.coeff(2)));
    double ray_min = 1e300;
    double arg_at = 0.0;
    for (int j = 0; j < rays; ++j) {
      const double th = 2.0 * kPi * j / rays;
      const double a = std::abs(eval(w, eval_radius * cx(std::cos(th), std::sin(th))));
      if (a < ray_min) {
        ray_min = a;
        arg_at = th;
      }
    }
    // golden-section refinement of the boundary minimum
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = arg_at - 2.0 * kPi / rays, hi = arg_at + 2.0 * kPi / rays;
    for (int it = 0; it < 48; ++it) {
      const double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
      const auto val = [&](double t) {
        return std::abs(eval(w, eval_radius * cx(std::cos(t), std::sin(t))));
      };
      if (val(c1) < val(c2)) hi = c2; else lo = c1;
    }
    ray_min = std::min(ray_min, std::abs(eval(w, eval_radius * cx(std::cos(0.5 * (lo + hi)),
                                                                  std::sin(0.5 * (lo + hi))))));
    rep.min_omitted_modulus = std::min(rep.min_omitted_modulus, ray_min);
  }
  if (rep.a2_max < 1e-9) {
    rep.holds = true;  // unbounded covering at truncation scale
    return rep;
  }
  rep.holds = rep.min_omitted_modulus >= 1.0 / (2.0 * rep.a2_max) - 1e-3;
  return rep;
}

// Koebe function z/(1-z)^2 truncated; the classical extremal for covering.
inline PowerSeries koebe_series(int degree) {
  std::vector<cx> c(static_cast<std::size_t>(degree) + 1, cx(0.0));
  for (int k = 1; k <= degree; ++k) c[static_cast<std::size_t>(k)] = cx(static_cast<double>(k));
  return PowerSeries(std::move(c));
}

}  // namespace qcd
