#include <cmath>
#include <vector>

#include <doctest.h>

#include "usk/errors.hpp"
#include "usk/experiment_harness.hpp"
#include "usk/usk_codec.hpp"

using namespace usk;

TEST_CASE("QamBox") {
  CHECK(QamBox::for_size(4).side == 2);
  CHECK(QamBox::for_size(256).side == 16);
  CHECK(QamBox::for_size(9).side == 3);
  CHECK_THROWS_AS(QamBox::for_size(15), DomainError);
  CHECK_THROWS_AS(QamBox::for_size(1), DomainError);
  CHECK_THROWS_AS(QamBox::for_size(0), DomainError);
  const QamBox box = QamBox::for_size(16);
  CHECK(box.contains(GaussianInt{0, 3}));
  CHECK_FALSE(box.contains(GaussianInt{4, 0}));
  CHECK_FALSE(box.contains(GaussianInt{-1, 0}));
  CHECK(is_perfect_square(1024));
  CHECK_FALSE(is_perfect_square(1023));
}

TEST_CASE("UskConfig validation names the failing condition") {
  UskConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_a = 2;
  c.n_b = 2;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("N_A > N_B"), DomainError);
  c = UskConfig{};
  c.n_e = 4;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("N_A > N_E"), DomainError);
  c = UskConfig{};
  c.n_e = 1;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("N_E >= N_B"), DomainError);
  c = UskConfig{};
  c.pv = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = UskConfig{};
  c.sigma_b = -1.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("map_bits packs Re then Im, least significant bit first") {
  // M = 16: two bits per axis, N_B = 1
  const std::vector<std::uint8_t> bits = {1, 0, 1, 1};
  const auto blocks = map_bits(bits, 16, 1);
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0][0] == GaussianInt{1, 3});
  CHECK(unmap_bits(blocks, 16) == bits);
}

TEST_CASE("map_bits / unmap_bits round trip") {
  RngStream rng(21, 0);
  for (std::uint64_t m : {4ULL, 16ULL, 64ULL, 256ULL, 1024ULL}) {
    const int bits_per = static_cast<int>(std::log2(static_cast<double>(m)) + 0.5);
    for (int n_b = 1; n_b <= 4; ++n_b) {
      for (int blocks = 1; blocks <= 3; ++blocks) {
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(blocks * n_b * bits_per));
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
        const auto mapped = map_bits(bits, m, n_b);
        REQUIRE(mapped.size() == static_cast<std::size_t>(blocks));
        const QamBox box = QamBox::for_size(m);
        for (const auto& u : mapped) {
          REQUIRE(u.size() == static_cast<std::size_t>(n_b));
          REQUIRE(box.contains(u));
        }
        REQUIRE(unmap_bits(mapped, m) == bits);
      }
    }
  }
}

TEST_CASE("map_bits errors") {
  const std::vector<std::uint8_t> three = {1, 0, 1};
  CHECK_THROWS_AS(map_bits(three, 16, 1), LengthError);
  const std::vector<std::uint8_t> four = {1, 0, 1, 0};
  CHECK_THROWS_AS(map_bits(four, 9, 1), DomainError);
  const std::vector<std::uint8_t> bad = {2, 0, 1, 0};
  CHECK_THROWS_AS(map_bits(bad, 16, 1), DomainError);
}

TEST_CASE("Bob recovers u exactly in the noiseless case") {
  for (int n_b : {1, 2, 3, 4}) {
    UskConfig cfg;
    cfg.n_b = n_b;
    cfg.n_e = n_b + 1;
    cfg.n_a = n_b + 2;
    cfg.pv = 3.0;
    for (std::uint64_t s = 0; s < 250; ++s) {
      RngStream rng(22, s);
      const auto ch = sample_channels(cfg, rng);
      const Precoder p = svd_split(ch.h);
      PlainVector u(static_cast<std::size_t>(n_b));
      for (auto& g : u) {
        g = {static_cast<std::int64_t>(rng.below(16)), static_cast<std::int64_t>(rng.below(16))};
      }
      const ComplexVector v = sample_key_ball(cfg.n_a - n_b, cfg.pv, rng);
      const ComplexVector x = encrypt(u, v, p);
      const ComplexVector z = bob_observe(ch.h, x, 0.0, rng);
      // The key is invisible to Bob.
      REQUIRE((z - ch.h * p.v1 * to_complex(u)).norm() <= 1e-9 * (1.0 + z.norm()));
      REQUIRE(bob_decode(z, ch.h, p, QamBox::for_size(256)) == u);
      REQUIRE(bob_decode(z, ch.h, p, std::nullopt) == u);
    }
  }
}

TEST_CASE("Eve observes G x") {
  RngStream rng(23, 0);
  UskConfig cfg;
  const auto ch = sample_channels(cfg, rng);
  const Precoder p = svd_split(ch.h);
  const PlainVector u = {{1, 2}, {3, 0}};
  const ComplexVector v = sample_key_ball(2, 1.0, rng);
  const ComplexVector x = encrypt(u, v, p);
  const ComplexVector y = eve_observe(ch.g, x);
  CHECK((y - ch.g * p.v1 * to_complex(u) - ch.g * p.z * v).norm() <= 1e-9);
  CHECK_THROWS_AS(eve_observe(ComplexMatrix::Zero(3, 3), x), DimensionError);
  CHECK_THROWS_AS(encrypt(u, ComplexVector::Zero(3), p), DimensionError);
}

TEST_CASE("bob_decode clamps to the box") {
  ComplexMatrix h = ComplexMatrix::Zero(1, 2);
  h(0, 0) = 1.0;
  const Precoder p = svd_split(h);
  const ComplexMatrix hv1 = h * p.v1;
  ComplexVector z(1);
  z(0) = hv1(0, 0) * Complex(20.0, -5.0);
  const PlainVector got = bob_decode(z, h, p, QamBox::for_size(16));
  CHECK(got[0] == GaussianInt{3, 0});
  const PlainVector free = bob_decode(z, h, p, std::nullopt);
  CHECK(free[0] == GaussianInt{20, -5});
}

TEST_CASE("Bob noise has the requested variance") {
  RngStream rng(24, 0);
  ComplexMatrix h = ComplexMatrix::Zero(1, 2);
  h(0, 0) = 1.0;
  const ComplexVector x = ComplexVector::Zero(2);
  double acc = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) acc += bob_observe(h, x, 0.25, rng).squaredNorm();
  CHECK(std::abs(acc / n - 0.25) <= 0.01);
}
