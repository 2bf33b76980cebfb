#include <cmath>

#include <boost/math/special_functions/beta.hpp>
#include <doctest.h>

#include "usk/errors.hpp"
#include "usk/secrecy_bounds.hpp"

using namespace usk;

namespace {

BoundParams example(double eps) {
  BoundParams p;
  p.n_a = 4;
  p.n_b = 2;
  p.n_e = 3;
  p.d = 2.0;
  p.eps = eps;
  return p;
}

// Direct binomial-tail sum in long double.
long double binomial_tail(int a, int b, long double x) {
  const int n = a + b - 1;
  long double total = 0.0L;
  for (int j = a; j <= n; ++j) {
    const long double c = std::exp(std::lgamma(static_cast<long double>(n + 1)) -
                                   std::lgamma(static_cast<long double>(j + 1)) -
                                   std::lgamma(static_cast<long double>(n - j + 1)));
    total += c * std::pow(x, j) * std::pow(1.0L - x, n - j);
  }
  return total;
}

}  // namespace

TEST_CASE("kappa and phi against high-precision values") {
  CHECK(kappa(1.0, 3) == doctest::Approx(0.564189583547756).epsilon(1e-12));
  CHECK(kappa(2.0, 3) == doctest::Approx(0.633281395583827).epsilon(1e-12));
  CHECK(kappa(2.0, 8) == doctest::Approx(0.589168390417563).epsilon(1e-12));
  CHECK(phi(2, 3) == doctest::Approx(0.638943104246272).epsilon(1e-12));
  CHECK(phi(4, 8) == doctest::Approx(0.395217657558481).epsilon(1e-12));
  CHECK(phi(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(phi(3, 2), DomainError);
  CHECK_THROWS_AS(kappa(0.5, 3), DomainError);
}

TEST_CASE("upsilon") {
  // x = 1 gives 1 per term
  CHECK(upsilon(1.0, 2, 3) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(upsilon(2.0, 1, 1) == doctest::Approx(0.735758882342885).epsilon(1e-12));
  CHECK(upsilon(3.0, 2, 3) == doctest::Approx(0.231767058768599).epsilon(1e-12));
  // decreasing for x > 1
  double prev = upsilon(1.0, 2, 3);
  for (double x = 1.1; x < 20.0; x += 0.1) {
    const double cur = upsilon(x, 2, 3);
    REQUIRE(cur < prev);
    prev = cur;
  }
  CHECK_THROWS_AS(upsilon(0.0, 2, 3), DomainError);
}

TEST_CASE("fd_upper_bound") {
  CHECK(fd_upper_bound(2.0, 1, 1) == doctest::Approx(1.235758882342885).epsilon(1e-12));
  CHECK(fd_upper_bound(3.0, 2, 3) ==
        doctest::Approx(1.0 / 9.0 + 0.231767058768599).epsilon(1e-12));
  CHECK_THROWS_AS(fd_upper_bound(1.0, 2, 3), DomainError);
  CHECK_THROWS_AS(fd_upper_bound(0.5, 2, 3), DomainError);
}

TEST_CASE("delta in the log domain") {
  // kappa(d)^{2N_E} vol / pv^{N_E} with vol = e^{log_vol}
  const double want = std::pow(kappa(2.0, 3), 6) * std::exp(1.5) / std::pow(2.0, 3);
  CHECK(delta(2.0, 2.0, 1.5, 3) == doctest::Approx(want).epsilon(1e-12));
  // exp(800) alone would overflow
  const double log_want = 16.0 * std::log(kappa(2.0, 8)) + 800.0 - 8.0 * std::log(1e40);
  CHECK(std::log(delta(2.0, 1e40, 800.0, 8)) == doctest::Approx(log_want).epsilon(1e-12));
}

TEST_CASE("design formulas reproduce the worked examples") {
  CHECK(theorem2_power(example(0.1990)) == doctest::Approx(3.662048846835329).epsilon(1e-12));
  CHECK(theorem2_power(example(0.3981)) == doctest::Approx(1.830564482592892).epsilon(1e-12));
  CHECK(theorem3_constellation(example(0.1990)) ==
        doctest::Approx(255.7296908130274).epsilon(1e-12));
  CHECK(theorem3_constellation(example(0.3981)) ==
        doctest::Approx(15.96705233804597).epsilon(1e-12));
  CHECK(std::abs(theorem2_power(example(0.1990)) - 3.6620) <= 0.002);
  CHECK(std::abs(theorem3_constellation(example(0.1990)) - 255.7297) <= 0.002);
  CHECK(next_square_qam(255.7297) == 256);
  CHECK(next_square_qam(15.967) == 16);
  CHECK(next_square_qam(16.0) == 16);
  CHECK(next_square_qam(16.5) == 64);
  CHECK(next_square_qam(1.0) == 4);
}

TEST_CASE("theorem2_power monotonicity") {
  double prev = 0.0;
  for (double eps = 0.9; eps > 0.01; eps -= 0.01) {
    const double pv = theorem2_power(example(eps));
    REQUIRE(pv > prev);
    prev = pv;
  }
}

TEST_CASE("BoundParams validation") {
  BoundParams p = example(0.1);
  CHECK_NOTHROW(p.validate());
  CHECK(p.n() == 2);
  CHECK(p.n_min() == 2);
  p.d = 1.0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = example(1.0);
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = example(0.1);
  p.n_e = 1;
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("power ratio and QAM energy") {
  CHECK(power_ratio(3.6620, 256, 2) == doctest::Approx(0.010770588235294).epsilon(1e-9));
  CHECK(qam_mean_energy(16, 1) == doctest::Approx(10.0));
  CHECK(qam_mean_energy(256, 2) == doctest::Approx(340.0));
  CHECK_THROWS_AS(power_ratio(1.0, 2.0, 1), DomainError);
}

TEST_CASE("theta") {
  CHECK(theta(2.0, 16.0, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(theta(1.0, 16.0, 0.0), DomainError);
  CHECK_THROWS_AS(theta(1.0, 2.0, 1.0), DomainError);
}

TEST_CASE("reg_inc_beta against Boost and a long-double sum") {
  for (int a = 1; a <= 40; a += 3) {
    for (int b = 1; b <= 12; ++b) {
      for (double x = 0.0; x <= 1.0; x += 0.03125) {
        const double got = reg_inc_beta(a, b, x);
        const double boost_ref = boost::math::ibeta(static_cast<double>(a), static_cast<double>(b), x);
        const double direct = static_cast<double>(binomial_tail(a, b, x));
        REQUIRE(got == doctest::Approx(boost_ref).epsilon(1e-10).scale(1e-300));
        REQUIRE(std::abs(got - direct) <= 1e-12 + 1e-10 * direct);
      }
    }
  }
  CHECK(reg_inc_beta(3, 2, 0.0) == 0.0);
  CHECK(reg_inc_beta(3, 2, 1.0) == 1.0);
  // I_x(1, 1) = x
  CHECK(reg_inc_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK_THROWS_AS(reg_inc_beta(0, 1, 0.5), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(1, 1, 1.5), DomainError);
}

TEST_CASE("lemma4 terms") {
  const BoundParams p = example(0.1990);
  const double pv = 3.6620, m = 256.0, x = 1.0;
  const double pi = 3.14159265358979323846, e = 2.71828182845904523536;
  const double want = x * x * m * 2 * 3 / (4 * pi * e * pv * 3 * 2);
  CHECK(lemma4_g(x, 1, p, pv, m) == doctest::Approx(want).epsilon(1e-12));
  CHECK(lemma4_g(x, 2, p, pv, m) == doctest::Approx(want * 2.0 / 3.0).epsilon(1e-12));
  // cdf lower bound is a product of two beta terms, increasing in x
  const double a = 3.0 * 2.0;
  const auto term = [&](double g, int j) {
    const double t = a * g / (a * g + (3 - j + 1));
    return boost::math::ibeta(a, static_cast<double>(3 - j + 1), t);
  };
  const double prod = term(lemma4_g(x, 1, p, pv, m), 1) * term(lemma4_g(x, 2, p, pv, m), 2);
  CHECK(lemma4_cdf_lower_bound(x, p, pv, m) == doctest::Approx(prod).epsilon(1e-9));
  double prev = 0.0;
  for (double xx = 0.05; xx < 4.0; xx += 0.05) {
    const double cur = lemma4_cdf_lower_bound(xx, p, pv, m);
    REQUIRE(cur >= prev);
    REQUIRE(cur <= 1.0);
    prev = cur;
  }
}
