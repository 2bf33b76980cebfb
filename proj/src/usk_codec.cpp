#include "usk/usk_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "usk/errors.hpp"

namespace usk {

bool is_perfect_square(std::uint64_t m) {
  const auto r = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(m))));
  return r * r == m;
}

QamBox QamBox::for_size(std::uint64_t m) {
  if (m < 4 || !is_perfect_square(m)) {
    throw DomainError("QAM size M=" + std::to_string(m) + " must be a perfect square >= 4");
  }
  return QamBox{static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(m))))};
}

bool QamBox::contains(const PlainVector& u) const {
  for (const auto& g : u) {
    if (!contains(g)) return false;
  }
  return true;
}

void UskConfig::validate() const {
  if (n_b < 1) throw DomainError("invalid dimensions: need N_B >= 1");
  if (!(n_a > n_b)) throw DomainError("invalid dimensions: need N_A > N_B");
  if (!(n_a > n_e)) throw DomainError("invalid dimensions: need N_A > N_E");
  if (!(n_e >= n_b)) throw DomainError("invalid dimensions: need N_E >= N_B");
  if (!(pv > 0.0)) throw DomainError("invalid power: need P_v > 0");
  if (!(sigma_b >= 0.0)) throw DomainError("invalid noise: need sigma_B^2 >= 0");
  if (m) QamBox::for_size(*m);
}

std::optional<QamBox> UskConfig::box() const {
  if (!m) return std::nullopt;
  return QamBox::for_size(*m);
}

ComplexVector to_complex(const PlainVector& u) {
  ComplexVector out(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) out(static_cast<Eigen::Index>(i)) = u[i].value();
  return out;
}

namespace {

int bits_per_coordinate(std::uint64_t m) {
  const QamBox box = QamBox::for_size(m);
  if (!std::has_single_bit(static_cast<std::uint64_t>(box.side))) {
    throw DomainError("bit mapping needs M to be a power of 4, got M=" + std::to_string(m));
  }
  return std::countr_zero(static_cast<std::uint64_t>(box.side));
}

}  // namespace

std::vector<PlainVector> map_bits(std::span<const std::uint8_t> bits, std::uint64_t m, int n_b) {
  if (n_b < 1) throw DimensionError("map_bits: N_B must be >= 1");
  const int per_coord = bits_per_coordinate(m);
  const std::size_t per_vector = static_cast<std::size_t>(n_b) * 2 * per_coord;
  if (bits.empty() || bits.size() % per_vector != 0) {
    throw LengthError("map_bits: " + std::to_string(bits.size()) +
                      " bits is not a positive multiple of N_B*log2(M) = " +
                      std::to_string(per_vector));
  }
  std::vector<PlainVector> out;
  out.reserve(bits.size() / per_vector);
  std::size_t pos = 0;
  auto read = [&] {
    std::int64_t value = 0;
    for (int b = 0; b < per_coord; ++b) {
      if (bits[pos] > 1) throw DomainError("map_bits: bit values must be 0 or 1");
      value |= static_cast<std::int64_t>(bits[pos++]) << b;
    }
    return value;
  };
  while (pos < bits.size()) {
    PlainVector u(static_cast<std::size_t>(n_b));
    for (auto& g : u) {
      g.re = read();
      g.im = read();
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<std::uint8_t> unmap_bits(std::span<const PlainVector> blocks, std::uint64_t m) {
  const int per_coord = bits_per_coordinate(m);
  const QamBox box = QamBox::for_size(m);
  std::vector<std::uint8_t> out;
  auto write = [&](std::int64_t value) {
    for (int b = 0; b < per_coord; ++b) out.push_back(static_cast<std::uint8_t>((value >> b) & 1));
  };
  for (const auto& u : blocks) {
    if (!box.contains(u)) throw DomainError("unmap_bits: symbol outside the QAM box");
    for (const auto& g : u) {
      write(g.re);
      write(g.im);
    }
  }
  return out;
}

ComplexVector encrypt(const PlainVector& u, const ComplexVector& v, const Precoder& p) {
  if (static_cast<Eigen::Index>(u.size()) != p.v1.cols() || v.size() != p.z.cols()) {
    throw DimensionError("encrypt: u or v does not match the precoder");
  }
  return p.v1 * to_complex(u) + p.z * v;
}

ComplexVector eve_observe(const ComplexMatrix& g, const ComplexVector& x) {
  if (g.cols() != x.size()) throw DimensionError("eve_observe: G columns != len(x)");
  return g * x;
}

ComplexVector bob_observe(const ComplexMatrix& h, const ComplexVector& x, double sigma_b,
                          RngStream& rng) {
  if (h.cols() != x.size()) throw DimensionError("bob_observe: H columns != len(x)");
  if (!(sigma_b >= 0.0)) throw DomainError("bob_observe: sigma_b must be >= 0");
  ComplexVector z = h * x;
  if (sigma_b > 0.0) z += std::sqrt(sigma_b) * sample_complex_gaussian(h.rows(), 1, rng).col(0);
  return z;
}

PlainVector bob_decode(const ComplexVector& z, const ComplexMatrix& h, const Precoder& p,
                       std::optional<QamBox> box) {
  const ComplexMatrix hv1 = h * p.v1;
  if (hv1.rows() != z.size()) throw DimensionError("bob_decode: len(z) != N_B");
  Eigen::JacobiSVD<ComplexMatrix> svd(hv1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > kRankTolerance * sv(0))) {
    throw RankError("bob_decode: H V1 is numerically singular");
  }
  const ComplexVector est = svd.solve(z);
  PlainVector u(static_cast<std::size_t>(est.size()));
  for (Eigen::Index i = 0; i < est.size(); ++i) {
    double re = std::round(est(i).real());
    double im = std::round(est(i).imag());
    if (box) {
      const double hi = static_cast<double>(box->side - 1);
      re = std::clamp(re, 0.0, hi);
      im = std::clamp(im, 0.0, hi);
    }
    u[static_cast<std::size_t>(i)] = {static_cast<std::int64_t>(re), static_cast<std::int64_t>(im)};
  }
  return u;
}

}  // namespace usk
