#include <cmath>
#include <numbers>
#include <set>

#include <doctest.h>

#include "oracles.hpp"
#include "usk/errors.hpp"
#include "usk/experiment_harness.hpp"
#include "usk/lattice_counter.hpp"

using namespace usk;

namespace {

ComplexMatrix random_basis(int n_e, int n_b, RngStream& rng) {
  return sample_complex_gaussian(n_e, n_b, rng);
}

}  // namespace

TEST_CASE("identity lattice counts match Gauss circle numbers") {
  // Z[i] in C: points of Z^2 within radius r
  const EveLattice lat(ComplexMatrix::Identity(1, 1));
  const ComplexVector origin = ComplexVector::Zero(1);
  CHECK(count_in_sphere(lat, origin, 0.0) == 1);
  CHECK(count_in_sphere(lat, origin, 1.0) == 5);
  CHECK(count_in_sphere(lat, origin, std::sqrt(2.0)) == 9);
  CHECK(count_in_sphere(lat, origin, 2.0) == 13);
  CHECK(count_in_sphere(lat, origin, 10.0) == 317);
  CHECK(count_in_sphere(lat, origin, 0.999) == 1);
}

TEST_CASE("identity lattice in C^2") {
  const EveLattice lat(ComplexMatrix::Identity(2, 2));
  const ComplexVector origin = ComplexVector::Zero(2);
  // Z^4 within radius 1: origin plus 8 unit vectors
  CHECK(count_in_sphere(lat, origin, 1.0) == 9);
  // r^2 = 2 adds 24 points with two +-1 entries
  CHECK(count_in_sphere(lat, origin, std::sqrt(2.0)) == 33);
}

TEST_CASE("finite box restricts the count") {
  const EveLattice lat(ComplexMatrix::Identity(1, 1));
  const ComplexVector origin = ComplexVector::Zero(1);
  // Only 0, 1, i lie in the 4-QAM box within radius 1
  CHECK(count_in_sphere(lat, origin, 1.0, QamBox::for_size(4)) == 3);
  CHECK(count_in_sphere(lat, origin, 100.0, QamBox::for_size(16)) == 16);
}

TEST_CASE("count_in_sphere matches the brute-force oracle") {
  int checked = 0;
  for (std::uint64_t s = 0; s < 400; ++s) {
    RngStream rng(31, s);
    const int n_b = 1 + static_cast<int>(s % 2);
    const int n_e = n_b + static_cast<int>(rng.below(2));
    const ComplexMatrix b = random_basis(n_e, n_b, rng);
    const EveLattice lat(b);
    const ComplexVector c = sample_complex_gaussian(n_e, 1, rng).col(0) * 3.0;
    const double radius = 0.2 + 2.5 * rng.uniform();
    std::optional<QamBox> box;
    if (s % 3 == 0) box = QamBox::for_size(s % 2 ? 16 : 4);
    const auto want = oracle::brute_count(b, c, radius, box);
    if (!want) continue;
    REQUIRE(count_in_sphere(lat, c, radius, box) == *want);
    ++checked;
  }
  CHECK(checked >= 300);
}

TEST_CASE("for_each_in_sphere visits each counted point once") {
  RngStream rng(32, 0);
  const ComplexMatrix b = random_basis(3, 2, rng);
  const EveLattice lat(b);
  const ComplexVector c = sample_complex_gaussian(3, 1, rng).col(0);
  std::set<PlainVector> seen;
  std::vector<PlainVector> order_a, order_b;
  for_each_in_sphere(lat, c, 2.0, std::nullopt, {}, [&](const PlainVector& u) {
    REQUIRE(seen.insert(u).second);
    REQUIRE(oracle::inside(oracle::distance_sq(b, u, c), 2.0, c));
    order_a.push_back(u);
  });
  for_each_in_sphere(lat, c, 2.0, std::nullopt, {},
                     [&](const PlainVector& u) { order_b.push_back(u); });
  CHECK(seen.size() == count_in_sphere(lat, c, 2.0));
  CHECK(order_a == order_b);
}

TEST_CASE("effective_key_index matches the sorted-candidate oracle") {
  for (std::uint64_t s = 0; s < 300; ++s) {
    RngStream rng(33, s);
    const int n_b = 1 + static_cast<int>(s % 2);
    const ComplexMatrix b = random_basis(n_b + 1, n_b, rng);
    const EveLattice lat(b);
    const QamBox box = QamBox::for_size(16);
    PlainVector u(static_cast<std::size_t>(n_b));
    for (auto& g : u) g = {static_cast<std::int64_t>(rng.below(4)), static_cast<std::int64_t>(rng.below(4))};
    const ComplexVector y = b * to_complex(u) + sample_complex_gaussian(n_b + 1, 1, rng).col(0);
    const auto want_box = oracle::brute_key_index(b, u, y, box);
    REQUIRE(want_box);
    REQUIRE(effective_key_index(lat, u, y, box) == *want_box);
    const auto want_inf = oracle::brute_key_index(b, u, y, std::nullopt);
    if (want_inf) REQUIRE(effective_key_index(lat, u, y) == *want_inf);
  }
}

TEST_CASE("effective_key_index breaks exact ties lexicographically") {
  // y equidistant from 0 and 1 on the identity lattice
  const EveLattice lat(ComplexMatrix::Identity(1, 1));
  ComplexVector y(1);
  y(0) = Complex(0.5, 0.0);
  CHECK(effective_key_index(lat, {{0, 0}}, y) == 1);
  CHECK(effective_key_index(lat, {{1, 0}}, y) == 2);
  y(0) = Complex(0.0, 0.0);
  CHECK(effective_key_index(lat, {{0, 0}}, y) == 1);
  // the four unit neighbours sort as (-1,0), (0,-1), (0,1), (1,0)
  CHECK(effective_key_index(lat, {{-1, 0}}, y) == 2);
  CHECK(effective_key_index(lat, {{0, -1}}, y) == 3);
  CHECK(effective_key_index(lat, {{0, 1}}, y) == 4);
  CHECK(effective_key_index(lat, {{1, 0}}, y) == 5);
  CHECK_THROWS_AS(effective_key_index(lat, {{5, 0}}, y, QamBox::for_size(4)), DomainError);
}

TEST_CASE("index never exceeds the count at the same radius") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream rng(34, s);
    const ComplexMatrix b = random_basis(3, 2, rng);
    const EveLattice lat(b);
    const PlainVector u = {{1, 0}, {2, 3}};
    const ComplexVector y = b * to_complex(u) + 0.8 * sample_complex_gaussian(3, 1, rng).col(0);
    const double own = (b * to_complex(u) - y).norm();
    REQUIRE(effective_key_index(lat, u, y) <= count_in_sphere(lat, y, own));
  }
}

TEST_CASE("effective radius") {
  const EveLattice z1(ComplexMatrix::Identity(1, 1));
  // n = 1: sqrt(1/(pi e))
  CHECK(effective_radius(z1, RadiusMode::StirlingApprox) ==
        doctest::Approx(0.342198280312217).epsilon(1e-12));
  // Real 2-ball of area 1
  CHECK(effective_radius(z1, RadiusMode::ExactBall) ==
        doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  ComplexMatrix scaled = ComplexMatrix::Identity(2, 2) * 3.0;
  const EveLattice z2(scaled);
  // vol = 81, vol^{1/4} = 3
  CHECK(z2.log_volume() == doctest::Approx(std::log(81.0)).epsilon(1e-12));
  CHECK(effective_radius(z2, RadiusMode::StirlingApprox) ==
        doctest::Approx(3.0 * std::sqrt(2.0 / (std::numbers::pi * std::numbers::e))).epsilon(1e-12));
}

TEST_CASE("r_max and approx_d") {
  ComplexMatrix gz = ComplexMatrix::Zero(2, 2);
  gz(0, 0) = 2.0;
  gz(1, 1) = 0.5;
  CHECK(r_max(gz, 3.0) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-12));
  CHECK(approx_d(2.0, 1.0, 2) == doctest::Approx(16.0));
  CHECK_THROWS_AS(approx_d(2.0, 0.0, 2), DomainError);
  CHECK_THROWS_AS(r_max(gz, 0.0), DomainError);
}

TEST_CASE("equivocation") {
  const std::vector<double> uniform4 = {1, 1, 1, 1};
  CHECK(equivocation_bits(uniform4) == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<double> skew = {3, 1};
  const double h = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(equivocation_bits(skew) == doctest::Approx(h).epsilon(1e-12));
  const std::vector<double> point = {0, 5, 0};
  CHECK(equivocation_bits(point) == doctest::Approx(0.0));
  CHECK(equivocation_bits(std::uint64_t{1}) == 0.0);
  CHECK(equivocation_bits(std::uint64_t{256}) == doctest::Approx(8.0));
  CHECK_THROWS_AS(equivocation_bits(std::span<const double>{}), DomainError);
  const std::vector<double> neg = {1, -1};
  CHECK_THROWS_AS(equivocation_bits(neg), DomainError);
  const std::vector<double> zeros = {0, 0};
  CHECK_THROWS_AS(equivocation_bits(zeros), DomainError);
  CHECK_THROWS_AS(equivocation_bits(std::uint64_t{0}), DomainError);
}

TEST_CASE("node budget overflow raises ResourceError") {
  const EveLattice lat(ComplexMatrix::Identity(2, 2));
  EnumerationLimits tiny;
  tiny.node_budget = 50;
  CHECK_THROWS_AS(count_in_sphere(lat, ComplexVector::Zero(2), 20.0, std::nullopt, tiny),
                  ResourceError);
}

TEST_CASE("input validation") {
  const EveLattice lat(ComplexMatrix::Identity(2, 2));
  CHECK_THROWS_AS(count_in_sphere(lat, ComplexVector::Zero(2), -1.0), DomainError);
  CHECK_THROWS_AS(count_in_sphere(lat, ComplexVector::Zero(3), 1.0), DimensionError);
  ComplexMatrix deficient = ComplexMatrix::Zero(3, 2);
  deficient(0, 0) = 1.0;
  deficient(0, 1) = 1.0;
  CHECK_THROWS_AS(EveLattice{deficient}, RankError);
}
