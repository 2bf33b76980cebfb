#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "usk/matrix_core.hpp"
#include "usk/usk_codec.hpp"

namespace usk {

// Eve's lattice {G V1 u : u in Z[i]^{N_B}} with its real embedding
// pre-factorized for enumeration.
class EveLattice {
public:
  // Throws RankError if the basis does not have full column rank.
  explicit EveLattice(ComplexMatrix basis);

  const ComplexMatrix& basis() const { return basis_; }
  double log_volume() const { return log_volume_; }
  int dim() const { return static_cast<int>(basis_.cols()); }

  // Real embedding [[Re B, -Im B], [Im B, Re B]] and its thin QR.
  const Eigen::MatrixXd& real_basis() const { return real_basis_; }
  const Eigen::MatrixXd& q() const { return q_; }
  const Eigen::MatrixXd& r() const { return r_; }

private:
  ComplexMatrix basis_;
  double log_volume_;
  Eigen::MatrixXd real_basis_;
  Eigen::MatrixXd q_;
  Eigen::MatrixXd r_;
};

enum class RadiusMode {
  StirlingApprox,  // sqrt(n/(pi e)) vol^{1/(2n)}
  ExactBall,    // radius of the real 2n-ball whose volume is vol
};

double effective_radius(const EveLattice& lat, RadiusMode mode);

// sqrt(lambda_max((GZ)^H GZ) * pv).
double r_max(const ComplexMatrix& gz, double pv);

struct EnumerationLimits {
  std::uint64_t node_budget = 100'000'000;
};

// Relative slack on the sphere boundary; points at distance <= radius*(1+slack)
// are inside.
inline constexpr double kSphereSlack = 1e-9;

// Number of lattice points within `radius` of `center`. With `bounds`, only
// u inside the QAM box are counted (L instead of D).
std::uint64_t count_in_sphere(const EveLattice& lat, const ComplexVector& center, double radius,
                              std::optional<QamBox> bounds = std::nullopt,
                              EnumerationLimits limits = {});

// Calls `visit` with every u whose image lies in the sphere. Enumeration order
// is deterministic.
void for_each_in_sphere(const EveLattice& lat, const ComplexVector& center, double radius,
                        std::optional<QamBox> bounds, EnumerationLimits limits,
                        const std::function<void(const PlainVector&)>& visit);

// (r_max / r_eff)^{2 N_B}, unrounded.
double approx_d(double r_max, double r_eff, int n_b);

// 1 + number of lattice points strictly closer to y than G V1 u. Equidistant
// points are ordered lexicographically by (Re u, Im u).
std::uint64_t effective_key_index(const EveLattice& lat, const PlainVector& u,
                                  const ComplexVector& y, std::optional<QamBox> bounds = std::nullopt,
                                  EnumerationLimits limits = {});

// Entropy in bits of the normalized weights. Throws DomainError when the set is
// empty, any weight is negative, or all are zero.
double equivocation_bits(std::span<const double> weights);
// Uniform posterior over `count` candidates: log2(count).
double equivocation_bits(std::uint64_t count);

}  // namespace usk
