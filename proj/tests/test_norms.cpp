#include <catch2/catch.hpp>

#include "qcd/detail/rng.hpp"
#include "qcd/extremals.hpp"
#include "qcd/norms.hpp"
#include "qcd/schwarzian.hpp"

using namespace qcd;

namespace {
PowerSeries random_series(std::uint64_t seed, int degree) {
  detail::Rng rng(seed);
  std::vector<cx> c(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k)
    c[static_cast<std::size_t>(k)] =
        cx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) / (1.0 + k);
  return PowerSeries(std::move(c));
}
}  // namespace

TEST_CASE("hardy_norm basics") {
  CHECK(hardy_norm(PowerSeries(std::vector<cx>{cx(0.3, -0.4)}), 3.0, 0.7).value ==
        Approx(0.5).margin(1e-13));
  // identity map: Parseval
  CHECK(hardy_norm(PowerSeries(std::vector<cx>{cx(0.0), cx(1.0)}), 2.0, 1.0).value ==
        Approx(1.0).margin(1e-13));
  CHECK_THROWS_AS(hardy_norm(random_series(1, 8), 0.5, 1.0), DomainError);
}

TEST_CASE("hardy_norm of the extremal family is 1 at truncation accuracy") {
  for (double p : {2.0, 3.0, 4.0}) {
    const auto rep = hardy_norm(kappa_series(1, p, 128), p, 1.0);
    CHECK(std::abs(rep.value - 1.0) < 2e-3);
  }
}

TEST_CASE("Parseval: quadrature equals coefficient sum at p = 2") {
  for (std::uint64_t seed : {2ull, 7ull, 19ull}) {
    const PowerSeries f = random_series(seed, 40);
    double sum = 0.0;
    for (int k = 0; k <= 40; ++k) sum += std::norm(f.coeff(k));
    const double quad = hardy_norm(f, 2.0, 1.0).value;
    CHECK(quad * quad == Approx(sum).margin(1e-12));
  }
}

TEST_CASE("mean function profile: monotone and log-convex") {
  // constant
  const auto flat = mean_function_profile(PowerSeries(std::vector<cx>{cx(1.0)}), 2.0,
                                          {0.2, 0.5, 0.9});
  for (double v : flat) CHECK(v == Approx(1.0).margin(1e-14));

  // identity map: M(r)^2 = r^2, exactly log-linear
  const auto id_prof = mean_function_profile(PowerSeries(std::vector<cx>{cx(0.0), cx(1.0)}),
                                             2.0, {0.25, 0.5, 1.0});
  CHECK(id_prof[0] == Approx(0.0625).margin(1e-13));
  CHECK(id_prof[1] == Approx(0.25).margin(1e-13));
  CHECK(id_prof[2] == Approx(1.0).margin(1e-13));
  CHECK(log_convexity_defect({0.25, 0.5, 1.0}, id_prof) == Approx(0.0).margin(1e-10));

  // random series: subharmonicity gives monotone + log-convex profiles
  std::vector<double> radii;
  for (int i = 1; i <= 12; ++i) radii.push_back(0.08 * i);
  for (std::uint64_t seed : {3ull, 8ull, 21ull}) {
    const PowerSeries f = random_series(seed, 10);
    for (double p : {1.5, 2.0, 3.0}) {
      const auto prof = mean_function_profile(f, p, radii);
      CHECK(profile_is_nondecreasing(prof));
      CHECK(log_convexity_defect(radii, prof) > -1e-12);
    }
  }

  CHECK_THROWS_AS(mean_function_profile(random_series(1, 4), 2.0, {0.5, 0.3}),
                  PreconditionError);
}

TEST_CASE("bergman_norm: coefficient identity and quadrature agreement") {
  for (double p : {1.5, 2.0, 3.0})
    CHECK(bergman_norm(PowerSeries(std::vector<cx>{cx(1.0)}), p).value ==
          Approx(1.0).margin(1e-10));

  // z^N at p = 2: (N+1)^{-1/2}
  for (int n : {1, 4, 9}) {
    std::vector<cx> c(static_cast<std::size_t>(n) + 1, cx(0.0));
    c[static_cast<std::size_t>(n)] = cx(1.0);
    CHECK(bergman_norm(PowerSeries(c), 2.0).value ==
          Approx(1.0 / std::sqrt(n + 1.0)).margin(1e-14));
  }

  for (std::uint64_t seed : {4ull, 11ull}) {
    const PowerSeries f = random_series(seed, 24);
    CHECK(bergman_norm(f, 2.0).value ==
          Approx(bergman_norm_quadrature(f, 2.0).value).margin(1e-9));
  }
}

TEST_CASE("bloch_norm: constants, Koebe Schwarzian, Bergman domination") {
  CHECK(bloch_norm(PowerSeries(std::vector<cx>{cx(0.0, 0.7)})).value ==
        Approx(0.7).margin(1e-9));
  // S_koebe = -6/(1-z^2)^2: the weight cancels on the real slice, sup = 6
  CHECK(bloch_norm(schwarzian_of(koebe_series(96))).value == Approx(6.0).margin(1e-6));
  // ||f||_B <= ||f||_{A_1}
  for (std::uint64_t seed : {5ull, 13ull, 29ull}) {
    const PowerSeries f = random_series(seed, 16);
    const double bloch = bloch_norm(f).value;
    const double a1 = bergman_norm_quadrature(f, 1.0).value;
    CHECK(bloch <= a1 + 1e-8);
  }
}

TEST_CASE("embedding: small Hardy norm forces small hyperbolic norm") {
  const auto r1 = embedding_check(PowerSeries(std::vector<cx>{cx(0.1)}), 2.0);
  CHECK(r1.in_ball);
  CHECK(r1.bloch == Approx(0.1).margin(1e-9));

  const PowerSeries half_kappa = 0.5 * kappa_series(1, 2.0, 64);
  const auto r2 = embedding_check(half_kappa, 2.0);
  CHECK(r2.in_ball);
  CHECK(r2.bloch < 2.0);

  // property sweep: every sampled zero-free series inside the ball embeds
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto style =
        (seed % 2 == 0) ? SampleStyle::exp_of_series : SampleStyle::zero_free_polynomial;
    PowerSeries f = sample_nonvanishing(seed, 2.0, style);
    f = (0.9 * std::pow(2.0, -0.5)) * f;  // scale into the ball
    const auto rep = embedding_check(f, 2.0);
    REQUIRE(rep.in_ball);
    CHECK(rep.bloch < 2.0);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("coefficient-energy chain for p >= 2") {
  // sum |c_n|^2 <= ||f||_2^2 <= ||f||_p^2 for unit-norm samples
  for (std::uint64_t seed : {0ull, 2ull, 4ull}) {
    for (double p : {2.0, 3.0, 6.0}) {
      const PowerSeries f = sample_nonvanishing(seed, p, SampleStyle::exp_of_series);
      double energy = 0.0;
      for (int k = 0; k <= f.degree(); ++k) energy += std::norm(f.coeff(k));
      const double h2 = hardy_norm(f, 2.0, 1.0).value;
      const double hp = hardy_norm(f, p, 1.0).value;
      CHECK(energy <= h2 * h2 + 1e-10);
      CHECK(h2 <= hp + 1e-10);
      CHECK(hp <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("Bergman energy is dominated by Hardy energy, coefficientwise") {
  // the corrected form of the half-inequality: sum |c_n|^2/(n+1) <= sum |c_n|^2
  for (std::uint64_t seed : {1ull, 6ull, 14ull}) {
    const PowerSeries f = random_series(seed, 32);
    const double berg = bergman_norm(f, 2.0).value;
    const double hardy = hardy_norm(f, 2.0, 1.0).value;
    CHECK(berg * berg <= hardy * hardy + 1e-12);
  }
}

TEST_CASE("norm reports carry error estimates") {
  const auto rep = hardy_norm(random_series(6, 12), 2.5, 1.0);
  CHECK(rep.estimated_error >= 0.0);
  CHECK(rep.estimated_error < 1e-8);
  CHECK(rep.quadrature_points > 0);
}
