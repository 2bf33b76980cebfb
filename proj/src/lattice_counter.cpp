#include "usk/lattice_counter.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "usk/errors.hpp"

namespace usk {

namespace {

Eigen::MatrixXd real_embedding(const ComplexMatrix& b) {
  const Eigen::Index m = b.rows();
  const Eigen::Index n = b.cols();
  Eigen::MatrixXd out(2 * m, 2 * n);
  out.topLeftCorner(m, n) = b.real();
  out.topRightCorner(m, n) = -b.imag();
  out.bottomLeftCorner(m, n) = b.imag();
  out.bottomRightCorner(m, n) = b.real();
  return out;
}

Eigen::VectorXd real_embedding(const ComplexVector& c) {
  Eigen::VectorXd out(2 * c.size());
  out.head(c.size()) = c.real();
  out.tail(c.size()) = c.imag();
  return out;
}

// Real coordinates (Re u..., Im u...) back to Z[i]^n.
PlainVector to_plain(const std::vector<std::int64_t>& x) {
  const std::size_t n = x.size() / 2;
  PlainVector u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = {x[i], x[n + i]};
  return u;
}

// Lexicographic order on the real embedding (Re u_1, ..., Re u_n, Im u_1, ...).
bool lex_less(const PlainVector& a, const PlainVector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].re != b[i].re) return a[i].re < b[i].re;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].im != b[i].im) return a[i].im < b[i].im;
  }
  return false;
}

class SphereEnumerator {
public:
  SphereEnumerator(const EveLattice& lat, const Eigen::VectorXd& q, double budget,
                   std::optional<QamBox> bounds, std::uint64_t node_budget,
                   const std::function<void(const PlainVector&)>& visit)
      : r_(lat.r()), q_(q), budget_(budget), bounds_(bounds), node_budget_(node_budget),
        visit_(visit), x_(static_cast<std::size_t>(q.size()), 0) {}

  void run() { descend(static_cast<int>(x_.size()) - 1, 0.0); }

private:
  void descend(int k, double acc) {
    double s = q_(k);
    for (std::size_t j = static_cast<std::size_t>(k) + 1; j < x_.size(); ++j) {
      s -= r_(k, static_cast<Eigen::Index>(j)) * static_cast<double>(x_[j]);
    }
    const double rkk = r_(k, k);
    const double rem = budget_ - acc;
    if (rem < 0.0) return;
    const double centre = s / rkk;
    const double half = std::sqrt(rem) / std::abs(rkk);
    double lo = std::ceil(centre - half - 1e-12 * (1.0 + std::abs(centre)));
    double hi = std::floor(centre + half + 1e-12 * (1.0 + std::abs(centre)));
    if (bounds_) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, static_cast<double>(bounds_->side - 1));
    }
    if (hi - lo + 1.0 > static_cast<double>(node_budget_)) over_budget();
    for (auto v = static_cast<std::int64_t>(lo); v <= static_cast<std::int64_t>(hi); ++v) {
      if (++nodes_ > node_budget_) over_budget();
      const double t = rkk * static_cast<double>(v) - s;
      const double next = acc + t * t;
      if (next > budget_) continue;
      x_[static_cast<std::size_t>(k)] = v;
      if (k == 0) {
        visit_(to_plain(x_));
      } else {
        descend(k - 1, next);
      }
    }
  }

  [[noreturn]] void over_budget() const {
    throw ResourceError("sphere enumeration exceeded node budget of " +
                        std::to_string(node_budget_));
  }

  const Eigen::MatrixXd& r_;
  const Eigen::VectorXd& q_;
  double budget_;
  std::optional<QamBox> bounds_;
  std::uint64_t node_budget_;
  const std::function<void(const PlainVector&)>& visit_;
  std::vector<std::int64_t> x_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

EveLattice::EveLattice(ComplexMatrix basis)
    : basis_(std::move(basis)), log_volume_(gram_log_volume(basis_)) {
  real_basis_ = real_embedding(basis_);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(real_basis_);
  const Eigen::Index n = real_basis_.cols();
  q_ = qr.householderQ() * Eigen::MatrixXd::Identity(real_basis_.rows(), n);
  r_ = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
}

double effective_radius(const EveLattice& lat, RadiusMode mode) {
  const double n = lat.dim();
  switch (mode) {
    case RadiusMode::StirlingApprox:
      return std::sqrt(n / (std::numbers::pi * std::numbers::e)) *
             std::exp(lat.log_volume() / (2.0 * n));
    case RadiusMode::ExactBall:
      return std::exp((lat.log_volume() + std::lgamma(n + 1.0) - n * std::log(std::numbers::pi)) /
                      (2.0 * n));
  }
  return 0.0;
}

double r_max(const ComplexMatrix& gz, double pv) {
  if (!(pv > 0.0)) throw DomainError("r_max: pv must be positive");
  return std::sqrt(spectral_norm_sq(gz) * pv);
}

void for_each_in_sphere(const EveLattice& lat, const ComplexVector& center, double radius,
                        std::optional<QamBox> bounds, EnumerationLimits limits,
                        const std::function<void(const PlainVector&)>& visit) {
  if (!(radius >= 0.0)) throw DomainError("count_in_sphere: radius must be >= 0");
  if (center.size() != lat.basis().rows()) {
    throw DimensionError("count_in_sphere: center dimension != lattice ambient dimension");
  }
  const Eigen::VectorXd c = real_embedding(center);
  const Eigen::VectorXd q = lat.q().transpose() * c;
  const double residual = (c - lat.q() * q).squaredNorm();
  const double outer = radius * (1.0 + kSphereSlack) + 1e-12 * (1.0 + center.norm());
  const double budget = outer * outer - residual;
  if (budget < 0.0) return;

  // Gaussian-heuristic prediction of the number of points in the ball.
  const double n = lat.dim();
  double log_pred = n * std::log(std::numbers::pi) + 2.0 * n * std::log(std::max(outer, 1e-300)) -
                    std::lgamma(n + 1.0) - lat.log_volume();
  if (bounds) log_pred = std::min(log_pred, 2.0 * n * std::log(static_cast<double>(bounds->side)));
  if (log_pred > std::log(static_cast<double>(limits.node_budget))) {
    throw ResourceError("sphere enumeration: predicted ~" + std::to_string(std::exp(log_pred)) +
                        " points exceeds node budget of " + std::to_string(limits.node_budget));
  }
  SphereEnumerator(lat, q, budget, bounds, limits.node_budget, visit).run();
}

std::uint64_t count_in_sphere(const EveLattice& lat, const ComplexVector& center, double radius,
                              std::optional<QamBox> bounds, EnumerationLimits limits) {
  std::uint64_t count = 0;
  for_each_in_sphere(lat, center, radius, bounds, limits, [&](const PlainVector&) { ++count; });
  return count;
}

double approx_d(double r_max, double r_eff, int n_b) {
  if (!(r_eff > 0.0)) throw DomainError("approx_d: r_eff must be positive");
  return std::pow(r_max / r_eff, 2.0 * n_b);
}

std::uint64_t effective_key_index(const EveLattice& lat, const PlainVector& u,
                                  const ComplexVector& y, std::optional<QamBox> bounds,
                                  EnumerationLimits limits) {
  if (static_cast<int>(u.size()) != lat.dim()) {
    throw DimensionError("effective_key_index: len(u) != lattice dimension");
  }
  if (bounds && !bounds->contains(u)) {
    throw DomainError("effective_key_index: u lies outside the QAM box");
  }
  const ComplexMatrix& b = lat.basis();
  const double own = (b * to_complex(u) - y).squaredNorm();
  const double tie = 1e-12 * (1.0 + own);
  std::uint64_t closer = 0;
  for_each_in_sphere(lat, y, std::sqrt(own), bounds, limits, [&](const PlainVector& w) {
    if (w == u) return;
    const double dist = (b * to_complex(w) - y).squaredNorm();
    if (dist < own - tie || (std::abs(dist - own) <= tie && lex_less(w, u))) ++closer;
  });
  return closer + 1;
}

double equivocation_bits(std::span<const double> weights) {
  if (weights.empty()) throw DomainError("equivocation_bits: empty candidate set");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw DomainError("equivocation_bits: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("equivocation_bits: all weights are zero");
  double h = 0.0;
  for (double w : weights) {
    if (w > 0.0) h += (w / total) * std::log2(total / w);
  }
  return h;
}

double equivocation_bits(std::uint64_t count) {
  if (count == 0) throw DomainError("equivocation_bits: empty candidate set");
  return std::log2(static_cast<double>(count));
}

}  // namespace usk
