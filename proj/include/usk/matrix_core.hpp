#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace usk {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Relative threshold below which the smallest singular value marks a matrix
// as rank-deficient.
inline constexpr double kRankTolerance = 1e-12;

// Orthonormal split of the transmit space: v1 spans the row space of H,
// z spans its null space, so that H * z == 0.
struct Precoder {
  ComplexMatrix v1;  // N_A x N_B
  ComplexMatrix z;   // N_A x (N_A - N_B)
};

// Deterministic random source keyed by (seed, stream_id). Two streams with the
// same key produce identical sequences; distinct stream ids are independent.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  double uniform();                 // [0, 1)
  double normal(double stddev);     // N(0, stddev^2)
  std::uint64_t below(std::uint64_t bound);  // uniform on {0, ..., bound-1}

  std::mt19937_64& engine() { return engine_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Right-singular-vector split of a wide full-row-rank channel.
// Throws DimensionError if cols <= rows, RankError if H is rank-deficient.
Precoder svd_split(const ComplexMatrix& h);

// log|det(A^H A)| via a QR factorization of A.
double gram_log_volume(const ComplexMatrix& a);

// Largest eigenvalue of A^H A.
double spectral_norm_sq(const ComplexMatrix& a);

// i.i.d. N_C(0, 1) entries: real and imaginary parts each have variance 1/2.
ComplexMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

enum class KeyDistribution {
  UniformBall,   // uniform over {v : |v|^2 <= pv}
  UniformPower,  // uniform direction, |v|^2 uniform on [0, pv]
  FixedNorm,     // uniform direction, |v|^2 == pv
};

ComplexVector sample_key_ball(Eigen::Index dim, double pv, RngStream& rng,
                              KeyDistribution mode = KeyDistribution::UniformBall);

}  // namespace usk
