#include "usk/secrecy_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "usk/errors.hpp"

namespace usk {

void BoundParams::validate() const {
  if (n_b < 1) throw DomainError("invalid dimensions: need N_B >= 1");
  if (!(n_e >= n_b)) throw DomainError("invalid dimensions: need N_E >= N_B");
  if (!(n_a > n_b)) throw DomainError("invalid dimensions: need N_A > N_B");
  if (!(n_a > n_e)) throw DomainError("invalid dimensions: need N_A > N_E");
  if (!(d >= 2.0)) throw DomainError("invalid target: need d >= 2");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("invalid target: need 0 < eps < 1");
}

double kappa(double d, int n_e) {
  if (!(d >= 1.0)) throw DomainError("kappa: need d >= 1");
  return std::exp(std::log(d) / (2.0 * n_e)) / std::sqrt(std::numbers::pi);
}

double phi(int n_b, int n_e) {
  if (n_b < 1 || n_e < n_b) throw DomainError("phi: need 1 <= N_B <= N_E");
  const double log_ratio = std::lgamma(n_e - n_b + 1.0) - std::lgamma(n_e + 1.0);
  return std::exp(log_ratio / (2.0 * n_b));
}

double upsilon(double x, int n_b, int n_e) {
  if (!(x > 0.0)) throw DomainError("upsilon: need x > 0");
  const double log_base = std::log(x) + 1.0 - x;
  double sum = 0.0;
  for (int i = 1; i <= n_b; ++i) sum += std::exp((n_e - i + 1) * log_base);
  return sum;
}

double delta(double d, double pv, double log_vol, int n_e) {
  if (!(pv > 0.0)) throw DomainError("delta: need pv > 0");
  return std::exp(2.0 * n_e * std::log(kappa(d, n_e)) + log_vol - n_e * std::log(pv));
}

double fd_upper_bound(double rho_over_kappa, int n_b, int n_e) {
  if (!(rho_over_kappa > 1.0)) {
    throw DomainError("fd_upper_bound: need rho > kappa(d), got ratio " +
                      std::to_string(rho_over_kappa));
  }
  return std::pow(rho_over_kappa, -static_cast<double>(n_b)) + upsilon(rho_over_kappa, n_b, n_e);
}

double theorem2_power(const BoundParams& p) {
  p.validate();
  const double k = kappa(p.d, p.n_e);
  const double f = phi(p.n_b, p.n_e);
  return std::pow(p.eps, -2.0 / p.n_min()) * k * k /
         std::pow(f, 2.0 * p.n_b / static_cast<double>(p.n_e));
}

double theorem3_constellation(const BoundParams& p) {
  p.validate();
  const double k = kappa(p.d, p.n_e);
  return std::pow(p.eps, -3.0 - 2.0 / p.n_min()) * k * k;
}

std::uint64_t next_square_qam(double m_min) {
  std::uint64_t m = 4;
  while (static_cast<double>(m) < m_min) {
    if (m > (std::uint64_t{1} << 60)) throw DomainError("next_square_qam: bound too large");
    m *= 4;
  }
  return m;
}

double theta(double r_max, double m, double r_eff) {
  if (!(r_eff > 0.0)) throw DomainError("theta: need r_eff > 0");
  if (!(m >= 4.0)) throw DomainError("theta: need M >= 4");
  return 2.0 * r_max / (std::sqrt(m) * r_eff);
}

double reg_inc_beta(int a, int b, double x) {
  if (a < 1 || b < 1) throw DomainError("reg_inc_beta: need integer a, b >= 1");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: need x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const int n = a + b - 1;
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  const double lgn = std::lgamma(n + 1.0);
  double sum = 0.0;
  for (int j = a; j <= n; ++j) {
    const double log_choose = lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    sum += std::exp(log_choose + j * lx + (n - j) * l1x);
  }
  return std::min(sum, 1.0);
}

double lemma4_g(double x, int j, const BoundParams& p, double pv, double m) {
  const double num = x * x * m * p.n_b * (p.n_e - j + 1);
  const double den = 4.0 * std::numbers::pi * std::numbers::e * pv * p.n_e * (p.n_a - p.n_b);
  return num / den;
}

double lemma4_cdf_lower_bound(double x, const BoundParams& p, double pv, double m) {
  if (!(x > 0.0)) return 0.0;
  const int a = p.n_e * (p.n_a - p.n_b);
  double prod = 1.0;
  for (int j = 1; j <= p.n_b; ++j) {
    const int b = p.n_e - j + 1;
    const double ag = a * lemma4_g(x, j, p, pv, m);
    // ag / (ag + b) written to stay exact as ag -> infinity
    const double arg = std::isinf(ag) ? 1.0 : ag / (ag + b);
    prod *= reg_inc_beta(a, b, arg);
  }
  return prod;
}

double power_ratio(double pv, double m, int n_b) {
  if (!(m >= 4.0)) throw DomainError("power_ratio: need M >= 4");
  return pv / qam_mean_energy(m, n_b);
}

double qam_mean_energy(double m, int n_b) { return 2.0 * (m - 1.0) * n_b / 3.0; }

}  // namespace usk
