#pragma once

#include <cstdint>

namespace usk {

// Design targets for the outage bounds.
struct BoundParams {
  int n_a = 4;
  int n_b = 2;
  int n_e = 3;
  double d = 2.0;     // target key-space size
  double eps = 0.1;   // outage target

  // Throws DomainError on N_E < N_B, N_B < 1, d < 2 or eps outside (0, 1).
  void validate() const;
  int n() const { return n_e - n_b + 1; }
  int n_min() const { return n() < n_b ? n() : n_b; }
};

// d^{1/(2 N_E)} / sqrt(pi)
double kappa(double d, int n_e);

// [(N_E - N_B)! / N_E!]^{1/(2 N_B)}
double phi(int n_b, int n_e);

// sum_{i=1}^{N_B} (x e^{1-x})^{N_E - i + 1}
double upsilon(double x, int n_b, int n_e);

// kappa(d)^{2 N_E} vol / pv^{N_E}, evaluated in the log domain.
double delta(double d, double pv, double log_vol, int n_e);

// Finite-N_B tail bound on Pr{D < d}: ratio^{-N_B} + upsilon(ratio).
// Requires ratio = rho / kappa(d) > 1.
double fd_upper_bound(double rho_over_kappa, int n_b, int n_e);

// AN power meeting the infinite-constellation outage target with equality:
// eps^{-2/N_min} kappa(d)^2 / phi^{2 N_B / N_E}.
double theorem2_power(const BoundParams& p);

// Minimum QAM size for the finite-constellation target: eps^{-3-2/N_min} kappa(d)^2.
double theorem3_constellation(const BoundParams& p);

// Smallest square QAM size 4^k that is >= m_min.
std::uint64_t next_square_qam(double m_min);

// 2 r_max / (sqrt(M) r_eff)
double theta(double r_max, double m, double r_eff);

// Regularized incomplete beta for integer parameters, as the binomial tail
// sum_{j=a}^{a+b-1} C(a+b-1, j) x^j (1-x)^{a+b-1-j}.
double reg_inc_beta(int a, int b, double x);

// x^2 M N_B (N_E - j + 1) / (4 pi e pv N_E (N_A - N_B))
double lemma4_g(double x, int j, const BoundParams& p, double pv, double m);

// Lower bound on Pr{theta(pv) < x}.
double lemma4_cdf_lower_bound(double x, const BoundParams& p, double pv, double m);

// Peak AN power over mean signal power of the shifted M-QAM: 3 pv / (2 (M-1) N_B).
double power_ratio(double pv, double m, int n_b);

// E|u|^2 for the zero-mean M-QAM with odd-integer coordinates: 2 (M-1) N_B / 3.
double qam_mean_energy(double m, int n_b);

}  // namespace usk
