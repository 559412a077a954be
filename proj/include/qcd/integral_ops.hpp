#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "qcd/detail/gauss.hpp"
#include "qcd/series.hpp"

namespace qcd {

// ---------------------------------------------------------------------------
// Annulus G_R = { R < |zeta - center| < R + 1 } in the image plane.  The
// unit width is part of the construction; only center and R vary.
// ---------------------------------------------------------------------------
struct AnnulusSpec {
  cx center{0.0, 0.0};
  double R = 2.0;

  AnnulusSpec() = default;
  AnnulusSpec(cx c, double r) : center(c), R(r) {
    if (!(R > 0.0)) throw PreconditionError("AnnulusSpec: R must be positive");
  }

  double outer() const { return R + 1.0; }

  bool same_as(const AnnulusSpec& o) const {
    return std::abs(center - o.center) < 1e-14 && std::abs(R - o.R) < 1e-14;
  }
};

// ---------------------------------------------------------------------------
// Densities on G_R spanned by monomials
//     (zeta - c)^a (conj(zeta) - conj(c))^b ln^q |zeta - c| .
// The plain (a, b) family carries the ansatz and the Laurent data of the
// construction; the ln powers appear because the Beurling transform of the
// family closes over them on the annulus, so the Neumann iteration never
// leaves closed forms.  q = 0 for every density a caller builds directly.
// ---------------------------------------------------------------------------
struct LaurentTerm {
  int a = 0;
  int b = 0;
  int q = 0;
  cx coeff{0.0, 0.0};
};

class LaurentDensity {
 public:
  explicit LaurentDensity(AnnulusSpec annulus) : annulus_(annulus) {}

  const AnnulusSpec& annulus() const { return annulus_; }

  void add(int a, int b, cx coeff, int q = 0) {
    if (std::abs(coeff) == 0.0) return;
    if (!std::isfinite(coeff.real()) || !std::isfinite(coeff.imag()))
      throw PreconditionError("LaurentDensity: amplitude must be finite");
    terms_[pack(a, b, q)] += coeff;
  }

  std::vector<LaurentTerm> terms() const {
    std::vector<LaurentTerm> out;
    out.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
      auto [a, b, q] = unpack(key);
      out.push_back(LaurentTerm{a, b, q, c});
    }
    return out;
  }

  std::size_t term_count() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  // Pointwise value; zeta is expected on (or near) the closed annulus.
  // Each term is composed in polar form: u^a conj(u)^b = |u|^{a+b}
  // e^{i(a-b) arg u}, so deep exponents never overflow an intermediate.
  cx value(cx zeta) const {
    const cx u = zeta - annulus_.center;
    const double au = std::abs(u);
    const double lu = std::log(au);
    const double pu = std::arg(u);
    cx acc(0.0);
    for (const auto& [key, c] : terms_) {
      auto [a, b, q] = unpack(key);
      const double lnmag = (a + b) * lu + q * std::log(std::abs(lu) > 0.0 ? std::abs(lu) : 1e-300);
      const double mag = std::exp(lnmag);
      if (mag == 0.0 || !std::isfinite(mag)) {
        if (std::isinf(mag)) acc += c * std::numeric_limits<double>::infinity();
        continue;
      }
      double sign = 1.0;
      if (q % 2 == 1 && lu < 0.0) sign = -1.0;
      acc += c * std::polar(sign * mag, (a - b) * pu);
    }
    return acc;
  }

  // Sup norm over the closed annulus on a polar grid (endpoints included).
  double sup_norm(int radial = 33, int angular = 128) const {
    double best = 0.0;
    for (int i = 0; i < radial; ++i) {
      const double r = annulus_.R + static_cast<double>(i) / (radial - 1);
      for (int j = 0; j < angular; ++j) {
        const double th = 2.0 * kPi * j / angular;
        best = std::max(best, std::abs(value(annulus_.center + r * cx(std::cos(th), std::sin(th)))));
      }
    }
    return best;
  }

  LaurentDensity conjugated() const {
    LaurentDensity out(annulus_);
    for (const auto& [key, c] : terms_) {
      auto [a, b, q] = unpack(key);
      out.add(b, a, std::conj(c), q);
    }
    return out;
  }

  LaurentDensity operator*(cx s) const {
    LaurentDensity out(annulus_);
    for (const auto& [key, c] : terms_) {
      auto [a, b, q] = unpack(key);
      out.add(a, b, s * c, q);
    }
    return out;
  }

  LaurentDensity operator+(const LaurentDensity& o) const {
    require_same_annulus(o);
    LaurentDensity out = *this;
    for (const auto& [key, c] : o.terms_) out.terms_[key] += c;
    return out;
  }

  LaurentDensity operator-(const LaurentDensity& o) const {
    require_same_annulus(o);
    LaurentDensity out = *this;
    for (const auto& [key, c] : o.terms_) out.terms_[key] -= c;
    return out;
  }

  // Pointwise product; stays in the family.
  LaurentDensity operator*(const LaurentDensity& o) const {
    require_same_annulus(o);
    LaurentDensity out(annulus_);
    for (const auto& [k1, c1] : terms_) {
      auto [a1, b1, q1] = unpack(k1);
      for (const auto& [k2, c2] : o.terms_) {
        auto [a2, b2, q2] = unpack(k2);
        out.add(a1 + a2, b1 + b2, c1 * c2, q1 + q2);
      }
    }
    return out;
  }

  // Drop terms whose magnitude over the annulus cannot exceed `floor`.
  // The comparison runs in log space so deep exponents cannot overflow.
  void prune(double floor) {
    const double ln_floor = std::log(floor);
    for (auto it = terms_.begin(); it != terms_.end();) {
      auto [a, b, q] = unpack(it->first);
      if (std::log(std::abs(it->second)) + log_term_sup(a, b, q) < ln_floor)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  void require_same_annulus(const LaurentDensity& o) const {
    if (!annulus_.same_as(o.annulus_))
      throw PreconditionError("LaurentDensity: annulus mismatch");
  }

  // max over [R, R+1] of sigma^{a+b} |ln sigma|^q, as a logarithm
  double log_term_sup(int a, int b, int q) const {
    const double r0 = annulus_.R, r1 = annulus_.outer();
    const double lr = (a + b >= 0) ? std::log(r1) : std::log(r0);
    const double l = std::max(std::abs(std::log(r0)), std::abs(std::log(r1)));
    return (a + b) * lr + q * std::log(std::max(l, 1e-30));
  }

  static cx ipow(cx z, int k) {
    if (k == 0) return cx(1.0);
    cx base = k > 0 ? z : cx(1.0) / z;
    int e = k > 0 ? k : -k;
    cx acc(1.0);
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }

 private:
  static std::int64_t pack(int a, int b, int q) {
    return (static_cast<std::int64_t>(a + (1 << 20)) << 42) |
           (static_cast<std::int64_t>(b + (1 << 20)) << 21) | static_cast<std::int64_t>(q);
  }
  static std::tuple<int, int, int> unpack(std::int64_t key) {
    const int q = static_cast<int>(key & ((1 << 21) - 1));
    const int b = static_cast<int>((key >> 21) & ((1 << 21) - 1)) - (1 << 20);
    const int a = static_cast<int>((key >> 42) & ((1 << 21) - 1)) - (1 << 20);
    return {a, b, q};
  }

  AnnulusSpec annulus_;
  std::unordered_map<std::int64_t, cx> terms_;
};

// ---------------------------------------------------------------------------
// Radial antiderivative J(x; b, q) = int sigma^{2b+1} ln^q sigma dsigma,
// the only integral the whole layer needs.
// ---------------------------------------------------------------------------
namespace detail_ops {

inline double radial_antiderivative(double x, int b, int q) {
  if (b == -1) {
    // int sigma^{-1} ln^q = ln^{q+1} x / (q+1)
    return std::pow(std::log(x), q + 1) / (q + 1);
  }
  // by parts: int s^{2b+1} ln^q = x^{2b+2}/(2b+2) ln^q x - q/(2b+2) int s^{2b+1} ln^{q-1}
  double acc = 0.0;
  double factor = std::pow(x, 2 * b + 2) / (2 * b + 2);
  double lx = std::log(x);
  double coeff = 1.0;
  for (int i = q; i >= 0; --i) {
    acc += coeff * factor * std::pow(lx, i);
    coeff *= -static_cast<double>(i) / (2 * b + 2);
  }
  return acc;
}

// Coefficients d_i with J(x) = x^{2b+2} sum_i d_i ln^i x (b != -1 only).
inline std::vector<double> radial_antiderivative_coeffs(int b, int q) {
  std::vector<double> d(static_cast<std::size_t>(q) + 1, 0.0);
  double coeff = 1.0 / (2 * b + 2);
  for (int i = q; i >= 0; --i) {
    d[static_cast<std::size_t>(i)] = coeff;
    coeff *= -static_cast<double>(i) / (2 * b + 2);
  }
  return d;
}

}  // namespace detail_ops

// ---------------------------------------------------------------------------
// The Cauchy transform T, its derivative Pi (Beurling transform), the
// pairing <nu, phi> = -(1/pi) iint nu phi, and the fraction basis phi_k.
// Sign conventions are frozen in docs/sign-conventions.md and pinned by
// tests: T(1) = ((R+1)^2 - R^2)/(w - c) outside, pairing of conj(phi_k)
// against phi_k equals -r_k^2.
// ---------------------------------------------------------------------------

// phi_k(zeta) = (zeta - center)^{-k-1} as a density.
inline LaurentDensity basis_fraction(int k, const AnnulusSpec& annulus) {
  if (k < 0) throw PreconditionError("basis_fraction: k must be >= 0");
  LaurentDensity d(annulus);
  d.add(-k - 1, 0, cx(1.0));
  return d;
}

// r_k^2 = (1/pi) iint |phi_k|^2 = 2 int_R^{R+1} s^{-2k-1} ds.
inline double gram_r2(int k, const AnnulusSpec& annulus) {
  if (k < 0) throw PreconditionError("gram_r2: k must be >= 0");
  const double R = annulus.R, R1 = annulus.outer();
  if (k == 0) return 2.0 * std::log(R1 / R);
  return (std::pow(R, -2 * k) - std::pow(R1, -2 * k)) / k;
}

// <nu, phi> = -(1/pi) iint_{G_R} nu phi dA.  Closed form: only terms whose
// product has equal holomorphic and antiholomorphic exponents survive the
// angular integral.
inline cx pairing(const LaurentDensity& nu, const LaurentDensity& phi) {
  nu.require_same_annulus(phi);
  const LaurentDensity prod = nu * phi;
  const double R = prod.annulus().R, R1 = prod.annulus().outer();
  cx acc(0.0);
  for (const auto& t : prod.terms()) {
    if (t.a != t.b) continue;
    acc += t.coeff * (detail_ops::radial_antiderivative(R1, t.a, t.q) -
                      detail_ops::radial_antiderivative(R, t.a, t.q));
  }
  return -2.0 * acc;  // -(1/pi) * 2 pi * radial
}

// T rho(w) = -(1/pi) iint rho(zeta)/(zeta - w) dA(zeta), evaluated by the
// term-wise radial closed forms.  Valid for every w off a thin band around
// the two circles, where the piecewise formulas switch.
inline cx cauchy_T(const LaurentDensity& rho, cx w, double boundary_band = 1e-8) {
  const AnnulusSpec& an = rho.annulus();
  const cx u = w - an.center;
  const double au = std::abs(u);
  if (std::abs(au - an.R) < boundary_band || std::abs(au - an.outer()) < boundary_band)
    throw DomainError("cauchy_T: evaluation point inside the annulus boundary band");
  using detail_ops::radial_antiderivative;
  cx acc(0.0);
  for (const auto& t : rho.terms()) {
    const int l = t.a - t.b;
    const double Jout = radial_antiderivative(an.outer(), t.b, t.q);
    const double Jin = radial_antiderivative(an.R, t.b, t.q);
    if (!std::isfinite(Jout) || !std::isfinite(Jin)) continue;  // vanishing deep tail
    cx contrib(0.0);
    if (au < an.R) {
      if (l >= 1) contrib = -2.0 * (Jout - Jin) * LaurentDensity::ipow(u, l - 1);
    } else if (au > an.outer()) {
      if (l <= 0) contrib = 2.0 * (Jout - Jin) * LaurentDensity::ipow(u, l - 1);
    } else {
      const double Ju = radial_antiderivative(au, t.b, t.q);
      if (l >= 1)
        contrib = -2.0 * (Jout - Ju) * LaurentDensity::ipow(u, l - 1);
      else
        contrib = 2.0 * (Ju - Jin) * LaurentDensity::ipow(u, l - 1);
    }
    acc += t.coeff * contrib;
  }
  return acc;
}

// Taylor data of T rho on the conformality disk D_0 = {|w - c| < R}:
// T rho(w) = sum_k t_k (w - c)^k with t_k = <rho, phi_k>.  Exact, since each
// term feeds exactly one frequency.
inline std::vector<cx> cauchy_T_disk_coeffs(const LaurentDensity& rho, int k_max) {
  using detail_ops::radial_antiderivative;
  const AnnulusSpec& an = rho.annulus();
  std::vector<cx> t(static_cast<std::size_t>(k_max) + 1, cx(0.0));
  for (const auto& term : rho.terms()) {
    const int k = term.a - term.b - 1;
    if (k < 0 || k > k_max) continue;
    const double J = radial_antiderivative(an.outer(), term.b, term.q) -
                     radial_antiderivative(an.R, term.b, term.q);
    t[static_cast<std::size_t>(k)] += -2.0 * J * term.coeff;
  }
  return t;
}

struct PiResult {
  LaurentDensity on_annulus;   // Pi rho restricted to G_R, exact in-family
  double off_family_residual;  // always 0 for family densities
};

// Beurling transform Pi = d/dw of T, restricted to the annulus where the
// Neumann iteration needs it.  The family is closed under Pi, so the
// remainder slot stays empty; it exists for gridded callers.
inline PiResult beurling_Pi(const LaurentDensity& rho) {
  using detail_ops::radial_antiderivative;
  using detail_ops::radial_antiderivative_coeffs;
  const AnnulusSpec& an = rho.annulus();
  LaurentDensity out(an);
  for (const auto& t : rho.terms()) {
    const int l = t.a - t.b;
    // boundary constant D of the active branch
    const double D = (l >= 1) ? radial_antiderivative(an.outer(), t.b, t.q)
                              : radial_antiderivative(an.R, t.b, t.q);
    // d/dw [ 2 u^{l-1} J(|u|) ]
    if (t.b == -1) {
      // J(|u|) = ln^{q+1}|u| / (q+1)
      if (l != 1)
        out.add(t.a - 1, 0, t.coeff * (2.0 * (l - 1) / (t.q + 1.0)), t.q + 1);
      out.add(t.a - 1, 0, t.coeff, t.q);  // from d/dw ln^{q+1}|u|/(q+1)
    } else {
      const auto d = radial_antiderivative_coeffs(t.b, t.q);
      for (int i = 0; i <= t.q; ++i) {
        if (d[static_cast<std::size_t>(i)] == 0.0) continue;
        // 2 (l-1) u^{l-2} * d_i |u|^{2b+2} ln^i
        if (l != 1)
          out.add(t.a - 1, t.b + 1, t.coeff * (2.0 * (l - 1) * d[static_cast<std::size_t>(i)]), i);
        // 2 u^{l-1} * d_i d/dw[ u^{b+1} ubar^{b+1} ln^i ]
        //   = 2 d_i [ (b+1) u^{a-1} ubar^{b+1} ln^i + (i/2) u^{a-1} ubar^{b+1} ln^{i-1} ]
        out.add(t.a - 1, t.b + 1, t.coeff * (2.0 * d[static_cast<std::size_t>(i)] * (t.b + 1)), i);
        if (i >= 1)
          out.add(t.a - 1, t.b + 1, t.coeff * (d[static_cast<std::size_t>(i)] * i), i - 1);
      }
    }
    // d/dw [ -2 D u^{l-1} ]
    if (l != 1) out.add(t.a - t.b - 2, 0, t.coeff * (-2.0 * D * (l - 1)));
  }
  return PiResult{std::move(out), 0.0};
}

struct NeumannResult {
  LaurentDensity rho;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // L2-grid norm of rho - mu - mu Pi rho
};

namespace detail_ops {

// Discrete L2 norm of a density over the annulus (radial Gauss-Legendre x
// uniform angles), used for the convergence and residual reports.
inline double l2_grid_norm(const LaurentDensity& d, int radial = 24, int angular = 128) {
  const auto rule = detail::gauss_legendre(radial, d.annulus().R, d.annulus().outer());
  double acc = 0.0;
  for (int i = 0; i < radial; ++i) {
    const double r = rule.nodes[i];
    double ang = 0.0;
    for (int j = 0; j < angular; ++j) {
      const double th = 2.0 * kPi * j / angular;
      const cx v = d.value(d.annulus().center + r * cx(std::cos(th), std::sin(th)));
      ang += std::norm(v);
    }
    acc += rule.weights[i] * r * (2.0 * kPi / angular) * ang;
  }
  return std::sqrt(acc);
}

}  // namespace detail_ops

// Neumann series rho = mu + mu Pi mu + mu Pi (mu Pi mu) + ... as the fixed
// point of rho = mu + mu Pi rho.  Converges geometrically for small sup
// norms; the report never hides a truncation.
inline NeumannResult neumann_solve(const LaurentDensity& mu, double tol = 1e-13,
                                   int kmax = 64) {
  const double cap = mu.sup_norm();
  if (cap >= 1.0)
    throw PreconditionError("neumann_solve: ||mu||_inf must be < 1");
  NeumannResult res{mu, 0, false, 0.0};
  if (mu.empty()) {
    res.iterations = 1;
    res.converged = true;
    return res;
  }
  LaurentDensity rho = mu;
  for (int it = 1; it <= kmax; ++it) {
    LaurentDensity next = mu + mu * beurling_Pi(rho).on_annulus;
    next.prune(1e-18);
    const double diff = detail_ops::l2_grid_norm(next - rho);
    rho = std::move(next);
    res.iterations = it;
    if (diff < tol) {
      res.converged = true;
      break;
    }
  }
  res.rho = rho;
  res.residual = detail_ops::l2_grid_norm(res.rho - mu - mu * beurling_Pi(res.rho).on_annulus);
  if (!res.converged) return res;  // honest non-convergence report
  return res;
}

// ---------------------------------------------------------------------------
// h = id + T rho: the quasiconformal automorphism determined by mu.
// ---------------------------------------------------------------------------
struct MapResiduals {
  double beltrami = 0.0;   // max |dbar h - mu dh| on the annulus grid
  double conformal = 0.0;  // max |dbar h| on the D_0 grid
};

struct MapRepresentation {
  AnnulusSpec annulus;
  LaurentDensity mu;
  LaurentDensity rho;
  std::vector<cx> laurent_coeffs;  // <mu, phi_k>, the first-order Taylor data
  std::vector<cx> disk_coeffs;     // t_k of the full T rho on D_0
  std::vector<cx> omega_grid;      // remainder omega = T(rho - mu) sampled on D_0
  MapResiduals residuals;

  MapRepresentation(AnnulusSpec an, LaurentDensity m, LaurentDensity r)
      : annulus(an), mu(std::move(m)), rho(std::move(r)) {}

  cx eval(cx w) const { return w + cauchy_T(rho, w); }

  // dbar and d by fourth-order central differences; h is smooth off the
  // annulus boundary circles.
  std::pair<cx, cx> wirtinger(cx w, double step) const {
    const auto hx = [&](double s) { return eval(w + cx(s, 0.0)); };
    const auto hy = [&](double s) { return eval(w + cx(0.0, s)); };
    const cx dx = (-hx(2 * step) + 8.0 * hx(step) - 8.0 * hx(-step) + hx(-2 * step)) / (12.0 * step);
    const cx dy = (-hy(2 * step) + 8.0 * hy(step) - 8.0 * hy(-step) + hy(-2 * step)) / (12.0 * step);
    const cx dbar = 0.5 * (dx + cx(0.0, 1.0) * dy);
    const cx d = 0.5 * (dx - cx(0.0, 1.0) * dy);
    return {dbar, d};
  }
};

// Build the map from a converged Neumann solution, verify the Beltrami
// equation on an interior annulus grid and conformality on D_0, and expose
// the Taylor data of the representation.
inline MapRepresentation build_map(const NeumannResult& neumann, const LaurentDensity& mu,
                                   const AnnulusSpec& annulus, double tol = 1e-11,
                                   int series_coeffs = 96) {
  if (!neumann.converged)
    throw PreconditionError("build_map: Neumann solve did not converge");
  mu.require_same_annulus(neumann.rho);
  MapRepresentation map(annulus, mu, neumann.rho);
  map.laurent_coeffs = cauchy_T_disk_coeffs(mu, series_coeffs);
  map.disk_coeffs = cauchy_T_disk_coeffs(neumann.rho, series_coeffs);

  // Beltrami residual on an interior verification grid.
  const double step = 2e-3;
  double worst = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double r = annulus.R + 0.12 + 0.76 * i / 6.0;
    for (int j = 0; j < 32; ++j) {
      const double th = 2.0 * kPi * j / 32.0;
      const cx w = annulus.center + r * cx(std::cos(th), std::sin(th));
      const auto [dbar, d] = map.wirtinger(w, step);
      worst = std::max(worst, std::abs(dbar - mu.value(w) * d));
    }
  }
  map.residuals.beltrami = worst;

  // Conformality residual on D_0 (h must be holomorphic there).
  worst = 0.0;
  map.omega_grid.reserve(5 * 16);
  const LaurentDensity second_order = neumann.rho - mu;
  for (int i = 0; i < 5; ++i) {
    const double r = (annulus.R - 0.2) * (i + 1) / 5.0;
    for (int j = 0; j < 16; ++j) {
      const double th = 2.0 * kPi * j / 16.0;
      const cx w = annulus.center + r * cx(std::cos(th), std::sin(th));
      const auto [dbar, d] = map.wirtinger(w, step);
      (void)d;
      worst = std::max(worst, std::abs(dbar));
      map.omega_grid.push_back(cauchy_T(second_order, w));
    }
  }
  map.residuals.conformal = worst;

  if (map.residuals.beltrami > 10.0 * std::max(tol, neumann.residual * 10.0) + 1e-12)
    throw StructureError("build_map: Beltrami residual inconsistent with the solve");
  return map;
}

// Sup of |omega| = |T(rho - mu)| over the sampled D_0 grid: the quadratic
// remainder of the representation.
inline double omega_sup(const MapRepresentation& map) {
  double s = 0.0;
  for (const auto& v : map.omega_grid) s = std::max(s, std::abs(v));
  return s;
}

// Moebius frame M with M(h(0)) = 0, M(h(1)) = 1, (M o h)'(0) = 1: the
// renormalization that puts a solved map into the variational-lemma frame.
struct MoebiusFrame {
  cx alpha{1.0, 0.0};
  cx gamma{0.0, 0.0};
  cx h0{0.0, 0.0};

  cx value(cx w) const { return alpha * (w - h0) / (gamma * w + 1.0); }
};

inline MoebiusFrame moebius_frame(const MapRepresentation& map) {
  const cx h0 = map.eval(cx(0.0));
  const cx h1 = map.eval(cx(1.0));
  cx dh0(1.0, 0.0);  // h'(0) from the D_0 Taylor data
  cx pw(1.0, 0.0);
  for (int k = 1; k < static_cast<int>(map.disk_coeffs.size()); ++k) {
    dh0 += static_cast<double>(k) * map.disk_coeffs[static_cast<std::size_t>(k)] * pw;
    pw *= -map.annulus.center;
  }
  MoebiusFrame frame;
  frame.h0 = h0;
  const cx ratio = (h1 - h0) / dh0;
  frame.gamma = (cx(1.0) - ratio) / (h0 * ratio - h1);
  frame.alpha = (cx(1.0) + frame.gamma * h0) / dh0;
  return frame;
}

// ---------------------------------------------------------------------------
// The norm-variation functional
//     phi(zeta) = -(p/2) iint_D |f|^{p-2} conj(f) / (f(z) - zeta) dx dy,
// holomorphic outside the disk |zeta - c| <= R and expanded there in the
// fraction basis: phi = sum_k b_k phi_k with
//     b_k = (p/2) iint_D |f|^{p-2} conj(f) (f(z) - c)^k dx dy .
// psi is the tail of phi beyond the targeted indices; it never vanishes for
// admissible f and carries the norm-control direction of the ansatz.
// ---------------------------------------------------------------------------
struct PhiData {
  AnnulusSpec annulus;
  std::vector<cx> b;    // b[k] multiplies phi_k, k = 0..K
  LaurentDensity psi;   // sum over k in [0, j) and (n, K] of b_k phi_k
  // When the annulus is centered at the origin, b[1] must equal
  // (p/2) iint |f|^p = (p/2) pi ||f||_{A_p}^p; exposed for the pinning test.
  double area_integral_p = 0.0;  // iint_D |f|^p dx dy

  PhiData(AnnulusSpec an) : annulus(an), psi(an) {}
};

inline PhiData phi_functional(const PowerSeries& f, double p, const AnnulusSpec& annulus,
                              int n, int expansion_order, int first_index = 0,
                              int radial_nodes = 64, int angular_nodes = 1024) {
  if (!(p > 1.0)) throw DomainError("phi_functional: requires p > 1");
  if (expansion_order < n + 1)
    throw PreconditionError("phi_functional: expansion order must exceed n");
  // Kernel expansion in powers of (f - c)/(zeta - c) requires sup |f - c| < R.
  double reach = 0.0;
  for (int j = 0; j < 512; ++j) {
    const double th = 2.0 * kPi * j / 512;
    reach = std::max(reach, std::abs(eval(f, cx(std::cos(th), std::sin(th))) - annulus.center));
  }
  if (reach > annulus.R - 1e-9)
    throw PreconditionError("phi_functional: annulus too small for the kernel expansion");

  PhiData data(annulus);
  const int K = expansion_order;
  data.b.assign(static_cast<std::size_t>(K) + 1, cx(0.0));
  const auto rule = detail::gauss_legendre(radial_nodes, 0.0, 1.0);
  for (int i = 0; i < radial_nodes; ++i) {
    const double r = rule.nodes[i];
    const double wr = rule.weights[i] * r * (2.0 * kPi / angular_nodes);
    for (int j = 0; j < angular_nodes; ++j) {
      const double th = 2.0 * kPi * j / angular_nodes;
      const cx fv = eval(f, r * cx(std::cos(th), std::sin(th)));
      const double afv = std::abs(fv);
      const double weight_mod = (p == 2.0) ? 1.0 : std::pow(afv, p - 2.0);
      const cx base = wr * weight_mod * std::conj(fv);
      cx shift_pow(1.0, 0.0);
      const cx shift = fv - annulus.center;
      for (int k = 0; k <= K; ++k) {
        data.b[static_cast<std::size_t>(k)] += base * shift_pow;
        shift_pow *= shift;
      }
      data.area_integral_p += wr * weight_mod * afv * afv;
    }
  }
  for (auto& bk : data.b) bk *= 0.5 * p;

  for (int k = 0; k <= K; ++k) {
    if (k >= first_index && k <= n) continue;  // targeted band stays out of psi
    data.psi.add(-k - 1, 0, data.b[static_cast<std::size_t>(k)]);
  }
  return data;
}

// Max modulus of the psi tail on a circle just outside the inner radius;
// the numerical witness that phi is not a finite combination of the
// targeted fractions.
inline double psi_witness(const PhiData& data, int samples = 256) {
  const double r = data.annulus.R + 0.25;
  double best = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double th = 2.0 * kPi * j / samples;
    best = std::max(best,
                    std::abs(data.psi.value(data.annulus.center + r * cx(std::cos(th), std::sin(th)))));
  }
  return best;
}

// ---------------------------------------------------------------------------
// First-order variational prediction for the normalized map (w(0)=0,
// w'(0)=1, w(1)=1) built from a Beltrami coefficient supported on the
// annulus.  Partial fractions collapse the kernel onto four Cauchy
// transforms, so the formula below is closed:
//   w(z) = z + (z^2-1) T mu(0) + (z^2-z) (T mu)'(0) - z^2 T mu(1) + T mu(z).
// ---------------------------------------------------------------------------
inline cx variational_predict(const LaurentDensity& mu, cx z, double sup_policy = 0.2) {
  const AnnulusSpec& an = mu.annulus();
  const double clear_radius = an.R - std::abs(an.center);
  if (clear_radius <= 1.1)
    throw PreconditionError("variational_predict: annulus must clear the points 0 and 1");
  if (std::abs(z) > 0.75 * clear_radius)
    throw DomainError("variational_predict: z outside the validity radius policy");
  if (mu.sup_norm() > sup_policy)
    throw PreconditionError("variational_predict: ||mu||_inf above the policy bound");

  const cx t0 = cauchy_T(mu, cx(0.0));
  const cx t1 = cauchy_T(mu, cx(1.0));
  const cx tz = cauchy_T(mu, z);
  const auto coeffs = cauchy_T_disk_coeffs(mu, 96);
  cx deriv0(0.0);
  cx pw(1.0);  // (0 - c)^{k-1}
  for (int k = 1; k < static_cast<int>(coeffs.size()); ++k) {
    deriv0 += static_cast<double>(k) * coeffs[static_cast<std::size_t>(k)] * pw;
    pw *= -an.center;
  }
  return z + (z * z - 1.0) * t0 + (z * z - z) * deriv0 - z * z * t1 + tz;
}

}  // namespace qcd
