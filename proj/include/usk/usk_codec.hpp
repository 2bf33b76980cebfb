#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "usk/matrix_core.hpp"

namespace usk {

// Element of Z[i].
struct GaussianInt {
  std::int64_t re = 0;
  std::int64_t im = 0;

  friend auto operator<=>(const GaussianInt&, const GaussianInt&) = default;
  Complex value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

using PlainVector = std::vector<GaussianInt>;

// Unshifted square QAM alphabet: Re and Im both range over {0, ..., side-1}.
struct QamBox {
  std::int64_t side = 0;

  static QamBox for_size(std::uint64_t m);  // throws DomainError unless m is a square >= 4
  std::uint64_t size() const { return static_cast<std::uint64_t>(side * side); }
  bool contains(const GaussianInt& g) const {
    return g.re >= 0 && g.re < side && g.im >= 0 && g.im < side;
  }
  bool contains(const PlainVector& u) const;
};

bool is_perfect_square(std::uint64_t m);

// Experiment contract. Eve's channel is noiseless.
struct UskConfig {
  int n_a = 4;
  int n_b = 2;
  int n_e = 3;
  double pv = 1.0;
  std::optional<std::uint64_t> m;  // nullopt: infinite constellation Z[i]^{N_B}
  double sigma_b = 0.0;            // Bob noise variance
  std::uint64_t seed = 1;

  // Throws DomainError naming the violated condition.
  void validate() const;
  std::optional<QamBox> box() const;
};

// Uniform prior for u in the infinite-constellation mode: components drawn
// from {-w, ..., w} + i{-w, ..., w}.
inline constexpr std::int64_t kDefaultInfinitePriorHalfWidth = 8;

ComplexVector to_complex(const PlainVector& u);

// Packs B*N_B*log2(M) bits into B plain vectors. Each component takes
// log2(M) bits: the first half fills Re, the second half Im, least
// significant bit first. M must be a power of 4.
std::vector<PlainVector> map_bits(std::span<const std::uint8_t> bits, std::uint64_t m, int n_b);
std::vector<std::uint8_t> unmap_bits(std::span<const PlainVector> blocks, std::uint64_t m);

// x = V1 u + Z v.
ComplexVector encrypt(const PlainVector& u, const ComplexVector& v, const Precoder& p);

// y = G x; Eve is noiseless.
ComplexVector eve_observe(const ComplexMatrix& g, const ComplexVector& x);

// z = H x + n_B, n_B ~ N_C(0, sigma_b I).
ComplexVector bob_observe(const ComplexMatrix& h, const ComplexVector& x, double sigma_b,
                          RngStream& rng);

// Zero-forcing: solve (H V1) u = z, then round to Z[i] or clamp-and-round
// to the QAM box.
PlainVector bob_decode(const ComplexVector& z, const ComplexMatrix& h, const Precoder& p,
                       std::optional<QamBox> box);

// One encryption event together with Eve's key-space bookkeeping.
struct CryptogramSample {
  PlainVector u;
  ComplexVector v;
  ComplexVector x;
  ComplexVector y;
  ComplexVector z;
  std::uint64_t k = 0;                // rank of G V1 u among Lambda_C points near y
  std::optional<std::uint64_t> k_f;   // rank within the finite constellation
  std::uint64_t d_count = 0;          // D
  std::optional<std::uint64_t> l_count;  // L
};

}  // namespace usk
