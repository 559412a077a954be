#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qcd/detail/fft.hpp"
#include "qcd/errors.hpp"

namespace qcd {

using cx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr int kDefaultDegree = 64;
// Radius used when an operation needs boundary values of a series whose
// zero-freeness has to be certified first.  Strictly inside the disk so that
// series with zeros on the unit circle (the extremal family has one) stay
// testable.
inline constexpr double kDefaultSampleRadius = 0.99;

// ---------------------------------------------------------------------------
// PowerSeries: truncated Taylor series sum_{k=0}^{N} c_k z^k on the unit disk.
// The truncation degree is explicit; trailing zeros are meaningful padding.
// All values are immutable once built, so series can be shared across threads.
// ---------------------------------------------------------------------------
class PowerSeries {
 public:
  PowerSeries() : coeffs_(1, cx(0.0)) {}

  explicit PowerSeries(std::vector<cx> coeffs,
                       double sample_radius_hint = kDefaultSampleRadius)
      : coeffs_(std::move(coeffs)), hint_(sample_radius_hint) {
    if (coeffs_.empty()) coeffs_.assign(1, cx(0.0));
    if (!(hint_ > 0.0) || hint_ > 1.0)
      throw PreconditionError("PowerSeries: sample_radius_hint must lie in (0,1]");
    for (const auto& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw PreconditionError("PowerSeries: coefficients must be finite");
  }

  static PowerSeries zero(int degree) {
    return PowerSeries(std::vector<cx>(static_cast<std::size_t>(degree) + 1, cx(0.0)));
  }

  static PowerSeries constant(cx value, int degree = 0) {
    std::vector<cx> c(static_cast<std::size_t>(degree) + 1, cx(0.0));
    c[0] = value;
    return PowerSeries(std::move(c));
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cx>& coeffs() const { return coeffs_; }
  double sample_radius_hint() const { return hint_; }

  cx coeff(int k) const {
    if (k < 0 || k > degree()) return cx(0.0);
    return coeffs_[static_cast<std::size_t>(k)];
  }

  PowerSeries with_hint(double hint) const {
    return PowerSeries(coeffs_, hint);
  }

  // Zero-pad or cut to the requested truncation degree.
  PowerSeries truncated(int new_degree) const {
    if (new_degree < 0) throw PreconditionError("truncated: negative degree");
    std::vector<cx> c(static_cast<std::size_t>(new_degree) + 1, cx(0.0));
    const int m = std::min(new_degree, degree());
    for (int k = 0; k <= m; ++k) c[static_cast<std::size_t>(k)] = coeffs_[static_cast<std::size_t>(k)];
    return PowerSeries(std::move(c), hint_);
  }
  PowerSeries extended(int new_degree) const {
    return truncated(std::max(new_degree, degree()));
  }

  bool is_identically_zero(double tol = 0.0) const {
    for (const auto& c : coeffs_)
      if (std::abs(c) > tol) return false;
    return true;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  std::vector<cx> coeffs_;
  double hint_ = kDefaultSampleRadius;
};

// Horner evaluation.  Only points of the closed unit disk are admitted; the
// truncation says nothing about the function outside it.
inline cx eval(const PowerSeries& f, cx z) {
  if (std::abs(z) > 1.0 + 1e-12)
    throw DomainError("eval: |z| > 1 is outside the series domain");
  cx acc(0.0);
  const auto& c = f.coeffs();
  for (int k = f.degree(); k >= 0; --k) acc = acc * z + c[static_cast<std::size_t>(k)];
  return acc;
}

inline PowerSeries derivative(const PowerSeries& f) {
  const int n = f.degree();
  if (n == 0) return PowerSeries::zero(0).with_hint(f.sample_radius_hint());
  std::vector<cx> c(static_cast<std::size_t>(n), cx(0.0));
  for (int k = 1; k <= n; ++k) c[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * f.coeff(k);
  return PowerSeries(std::move(c), f.sample_radius_hint());
}

// Binary arithmetic truncates to the smaller operand degree, so error
// behavior stays predictable; extend() first when the full product matters.
inline PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
  const int n = std::min(a.degree(), b.degree());
  std::vector<cx> c(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = a.coeff(k) + b.coeff(k);
  return PowerSeries(std::move(c), std::min(a.sample_radius_hint(), b.sample_radius_hint()));
}

inline PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
  const int n = std::min(a.degree(), b.degree());
  std::vector<cx> c(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = a.coeff(k) - b.coeff(k);
  return PowerSeries(std::move(c), std::min(a.sample_radius_hint(), b.sample_radius_hint()));
}

inline PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
  const int n = std::min(a.degree(), b.degree());
  std::vector<cx> c(static_cast<std::size_t>(n) + 1, cx(0.0));
  for (int i = 0; i <= n; ++i) {
    const cx ai = a.coeff(i);
    if (ai == cx(0.0)) continue;
    for (int j = 0; j + i <= n; ++j) c[static_cast<std::size_t>(i + j)] += ai * b.coeff(j);
  }
  return PowerSeries(std::move(c), std::min(a.sample_radius_hint(), b.sample_radius_hint()));
}

inline PowerSeries operator*(cx s, const PowerSeries& a) {
  std::vector<cx> c = a.coeffs();
  for (auto& v : c) v *= s;
  return PowerSeries(std::move(c), a.sample_radius_hint());
}
inline PowerSeries operator*(const PowerSeries& a, cx s) { return s * a; }
inline PowerSeries operator*(double s, const PowerSeries& a) { return cx(s) * a; }
inline PowerSeries operator*(const PowerSeries& a, double s) { return cx(s) * a; }

// 1/f as a series; requires f(0) != 0.
inline PowerSeries reciprocal(const PowerSeries& f) {
  const cx c0 = f.coeff(0);
  if (std::abs(c0) == 0.0)
    throw DegenerateInputError("reciprocal: constant term vanishes");
  const int n = f.degree();
  std::vector<cx> r(static_cast<std::size_t>(n) + 1, cx(0.0));
  r[0] = cx(1.0) / c0;
  for (int k = 1; k <= n; ++k) {
    cx s(0.0);
    for (int j = 1; j <= k; ++j) s += f.coeff(j) * r[static_cast<std::size_t>(k - j)];
    r[static_cast<std::size_t>(k)] = -s / c0;
  }
  return PowerSeries(std::move(r), f.sample_radius_hint());
}

inline PowerSeries divide(const PowerSeries& a, const PowerSeries& b) {
  return a * reciprocal(b);
}

// ---------------------------------------------------------------------------
// Boundary samples of a function on the circle |z| = radius.
// ---------------------------------------------------------------------------
struct BoundarySamples {
  double radius = 1.0;
  std::vector<cx> values;  // values[k] = f(radius * e^{2 pi i k / M}), M a power of two

  BoundarySamples(double r, std::vector<cx> v) : radius(r), values(std::move(v)) {
    if (!(radius > 0.0) || radius > 1.0)
      throw PreconditionError("BoundarySamples: radius must lie in (0,1]");
    if (!detail::is_power_of_two(values.size()))
      throw PreconditionError("BoundarySamples: sample count must be a power of two");
  }

  int count() const { return static_cast<int>(values.size()); }
};

inline BoundarySamples sample_boundary(const PowerSeries& f, double radius, int m) {
  if (!detail::is_power_of_two(static_cast<std::size_t>(m)))
    throw PreconditionError("sample_boundary: sample count must be a power of two");
  std::vector<cx> v(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * kPi * k / m;
    v[static_cast<std::size_t>(k)] = eval(f, radius * cx(std::cos(th), std::sin(th)));
  }
  return BoundarySamples(radius, std::move(v));
}

// Taylor coefficients from boundary values: c_n = (angular mean of
// values * e^{-i n theta}) / radius^n.  The anti-aliasing margin
// N <= (M-1)/2 is enforced; beyond it high coefficients fold down.
inline PowerSeries coeffs_from_boundary(const BoundarySamples& s, int n_max) {
  const int m = s.count();
  if (n_max < 0) throw PreconditionError("coeffs_from_boundary: negative degree");
  if (n_max > (m - 1) / 2)
    throw PreconditionError("coeffs_from_boundary: aliasing guard N <= (M-1)/2 violated");
  std::vector<cx> work = s.values;
  detail::fft(work, -1);
  std::vector<cx> c(static_cast<std::size_t>(n_max) + 1);
  double rpow = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    c[static_cast<std::size_t>(n)] = work[static_cast<std::size_t>(n)] / (static_cast<double>(m) * rpow);
    rpow *= s.radius;
  }
  return PowerSeries(std::move(c), std::min(1.0, s.radius));
}

// ---------------------------------------------------------------------------
// Zero-freeness by the argument principle.
// ---------------------------------------------------------------------------
struct NonvanishingReport {
  bool nonvanishing = false;
  int winding_number = 0;
  double min_modulus = 0.0;  // over the sampled contour
};

// Winding number of f over |z| = r from sampled argument increments.
// Errors out when a zero sits within the resolution of the contour
// (min |f| below 1e-9 * max |f|), since the count is ill-posed there.
inline NonvanishingReport is_nonvanishing(const PowerSeries& f, double r) {
  if (!(r > 0.0) || r > 1.0)
    throw PreconditionError("is_nonvanishing: radius must lie in (0,1]");
  if (f.is_identically_zero())
    throw DegenerateInputError("is_nonvanishing: series is identically zero");

  int m = std::max(1024, 8 * (f.degree() + 1));
  m = static_cast<int>(std::bit_ceil(static_cast<unsigned>(m)));
  for (;; m *= 2) {
    std::vector<cx> v(static_cast<std::size_t>(m));
    double minmod = 1e300, maxmod = 0.0;
    int argmin = 0;
    for (int k = 0; k < m; ++k) {
      const double th = 2.0 * kPi * k / m;
      v[static_cast<std::size_t>(k)] = eval(f, r * cx(std::cos(th), std::sin(th)));
      const double a = std::abs(v[static_cast<std::size_t>(k)]);
      if (a < minmod) {
        minmod = a;
        argmin = k;
      }
      maxmod = std::max(maxmod, a);
    }
    if (minmod <= 1e-9 * maxmod)
      throw ContourError("is_nonvanishing: zero too close to the contour",
                         2.0 * kPi * argmin / m);
    double total = 0.0;
    double max_step = 0.0;
    for (int k = 0; k < m; ++k) {
      const cx ratio = v[static_cast<std::size_t>((k + 1) % m)] / v[static_cast<std::size_t>(k)];
      const double d = std::arg(ratio);
      max_step = std::max(max_step, std::abs(d));
      total += d;
    }
    // Each increment must be well under pi or the branch choice is ambiguous.
    if (max_step < 1.5 && m >= 8 * (f.degree() + 1)) {
      const int winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
      return NonvanishingReport{winding == 0, winding, minmod};
    }
    if (m >= (1 << 21))
      throw ContourError("is_nonvanishing: argument increments never settled",
                         2.0 * kPi * argmin / m);
  }
}

// ---------------------------------------------------------------------------
// log / exp / principal powers at series level.  The branch is anchored at
// the constant term and continued by the series recurrences themselves,
// never by pointwise argument unwinding.
// ---------------------------------------------------------------------------

// exp of a series; exact recurrence (n+1) E_{n+1} = sum (k+1) g_{k+1} E_{n-k}.
// Transcendental results are carried to at least the default working degree.
inline PowerSeries exp_series(const PowerSeries& g_in) {
  const PowerSeries g = g_in.extended(std::max(g_in.degree(), kDefaultDegree));
  const int n = g.degree();
  std::vector<cx> e(static_cast<std::size_t>(n) + 1, cx(0.0));
  e[0] = std::exp(g.coeff(0));
  for (int k = 0; k < n; ++k) {
    cx s(0.0);
    for (int j = 0; j <= k; ++j)
      s += static_cast<double>(j + 1) * g.coeff(j + 1) * e[static_cast<std::size_t>(k - j)];
    e[static_cast<std::size_t>(k + 1)] = s / static_cast<double>(k + 1);
  }
  return PowerSeries(std::move(e), g.sample_radius_hint());
}

namespace detail_series {
inline void require_branch_safe(const PowerSeries& f, const char* op) {
  if (f.is_identically_zero())
    throw DegenerateInputError(std::string(op) + ": series is identically zero");
  if (std::abs(f.coeff(0)) == 0.0)
    throw DegenerateInputError(std::string(op) + ": constant term vanishes");
  const auto rep = is_nonvanishing(f, f.sample_radius_hint());
  if (!rep.nonvanishing)
    throw BranchError(std::string(op) + ": series vanishes on the sampled disk");
}
}  // namespace detail_series

// log f with the principal branch fixed by Log f(0).
inline PowerSeries log_series(const PowerSeries& f_in) {
  detail_series::require_branch_safe(f_in, "log_series");
  const PowerSeries f = f_in.extended(std::max(f_in.degree(), kDefaultDegree));
  const int n = f.degree();
  const cx c0 = f.coeff(0);
  std::vector<cx> l(static_cast<std::size_t>(n) + 1, cx(0.0));
  l[0] = std::log(c0);
  // (n+1) c_{n+1} = sum_{k=0..n} (k+1) l_{k+1} c_{n-k}, solved for l.
  for (int k = 0; k < n; ++k) {
    cx s = static_cast<double>(k + 1) * f.coeff(k + 1);
    for (int j = 0; j < k; ++j)
      s -= static_cast<double>(j + 1) * l[static_cast<std::size_t>(j + 1)] * f.coeff(k - j);
    l[static_cast<std::size_t>(k + 1)] = s / (static_cast<double>(k + 1) * c0);
  }
  return PowerSeries(std::move(l), f.sample_radius_hint());
}

// f^alpha = exp(alpha log f), principal branch.  The result keeps at least
// the default working degree so that polynomial inputs of low degree still
// carry their full expansion.
inline PowerSeries principal_power(const PowerSeries& f, double alpha) {
  detail_series::require_branch_safe(f, "principal_power");
  return exp_series(cx(alpha) * log_series(f));
}

// f(z^m): coefficient at z^{m n} equals c_n; truncation degree m * N.
inline PowerSeries compose_power(const PowerSeries& f, int m) {
  if (m < 1) throw PreconditionError("compose_power: m must be >= 1");
  const int n = f.degree();
  std::vector<cx> c(static_cast<std::size_t>(n) * m + 1, cx(0.0));
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k) * m] = f.coeff(k);
  return PowerSeries(std::move(c), f.sample_radius_hint());
}

}  // namespace qcd
