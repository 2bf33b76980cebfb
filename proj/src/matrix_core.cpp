#include "usk/matrix_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "usk/errors.hpp"

namespace usk {

namespace {

std::string shape(const ComplexMatrix& a) {
  std::ostringstream os;
  os << a.rows() << "x" << a.cols();
  return os.str();
}

Eigen::VectorXd singular_values(const ComplexMatrix& a) {
  return Eigen::JacobiSVD<ComplexMatrix>(a).singularValues();
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::normal(double stddev) {
  return std::normal_distribution<double>(0.0, stddev)(engine_);
}

std::uint64_t RngStream::below(std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
}

Precoder svd_split(const ComplexMatrix& h) {
  const Eigen::Index n_b = h.rows();
  const Eigen::Index n_a = h.cols();
  if (n_b < 1 || n_a <= n_b) {
    throw DimensionError("svd_split: need N_A > N_B >= 1, got H of shape " + shape(h));
  }
  Eigen::JacobiSVD<ComplexMatrix, Eigen::FullPivHouseholderQRPreconditioner> svd(
      h, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(n_b - 1) > kRankTolerance * sv(0))) {
    throw RankError("svd_split: channel matrix is numerically rank-deficient");
  }
  const ComplexMatrix& v = svd.matrixV();
  return Precoder{v.leftCols(n_b), v.rightCols(n_a - n_b)};
}

double gram_log_volume(const ComplexMatrix& a) {
  if (a.rows() < a.cols() || a.cols() < 1) {
    throw RankError("gram_log_volume: " + shape(a) + " cannot have full column rank");
  }
  const Eigen::VectorXd sv = singular_values(a);
  if (!(sv(sv.size() - 1) > kRankTolerance * sv(0))) {
    throw RankError("gram_log_volume: matrix is numerically rank-deficient");
  }
  // det(A^H A) = prod sigma_i^2
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) acc += 2.0 * std::log(sv(i));
  return acc;
}

double spectral_norm_sq(const ComplexMatrix& a) {
  if (a.size() == 0) throw DimensionError("spectral_norm_sq: empty matrix");
  const double top = singular_values(a)(0);
  return top * top;
}

ComplexMatrix sample_complex_gaussian(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  if (rows < 1 || cols < 1) throw DimensionError("sample_complex_gaussian: empty shape");
  const double sd = std::sqrt(0.5);
  ComplexMatrix out(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = rng.normal(sd);
      const double im = rng.normal(sd);
      out(r, c) = Complex(re, im);
    }
  }
  return out;
}

ComplexVector sample_key_ball(Eigen::Index dim, double pv, RngStream& rng, KeyDistribution mode) {
  if (!(pv > 0.0)) throw DomainError("sample_key_ball: pv must be positive");
  if (dim < 1) throw DimensionError("sample_key_ball: dim must be >= 1");
  ComplexVector dir = sample_complex_gaussian(dim, 1, rng).col(0);
  double norm = dir.norm();
  while (norm == 0.0) {
    dir = sample_complex_gaussian(dim, 1, rng).col(0);
    norm = dir.norm();
  }
  double radius = std::sqrt(pv);
  switch (mode) {
    case KeyDistribution::UniformBall:
      // Real dimension is 2*dim.
      radius *= std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(dim)));
      break;
    case KeyDistribution::UniformPower:
      radius *= std::sqrt(rng.uniform());
      break;
    case KeyDistribution::FixedNorm:
      break;
  }
  ComplexVector v = dir * (radius / norm);
  // Rounding can push |v|^2 a hair above pv; pull it back inside.
  const double n2 = v.squaredNorm();
  if (n2 > pv) v *= std::sqrt(pv / n2) * (1.0 - 1e-15);
  return v;
}

}  // namespace usk
