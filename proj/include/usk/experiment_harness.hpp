#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "usk/lattice_counter.hpp"
#include "usk/matrix_core.hpp"
#include "usk/secrecy_bounds.hpp"
#include "usk/usk_codec.hpp"

namespace usk {

inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

// Outcome of a Bernoulli Monte Carlo run.
struct BinomialEstimate {
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  WilsonInterval ci;
};

// Runs `event` once per trial with RngStream(seed, stream_base + trial).
// The count is independent of `threads` (0 means hardware concurrency).
BinomialEstimate monte_carlo(std::uint64_t trials, std::uint64_t seed, unsigned threads,
                             const std::function<bool(std::uint64_t trial, RngStream&)>& event,
                             std::uint64_t stream_base = 0);

struct OutageEstimate {
  std::string sweep_param;
  double sweep_value = 0.0;
  UskConfig config;
  std::uint64_t b = 1;
  double d = 2.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::string mode;
  double elapsed_s = 0.0;
};

enum class CountMode { Approx, Exact };
enum class FiniteMode { Direct, Factorized };

struct SweepSpec {
  UskConfig base;
  // Infinite sweeps: "eps" (P_v from theorem2_power) or "pv".
  // Finite sweeps: "b", "m" or "pv".
  std::string param = "eps";
  std::vector<double> grid;
  std::uint64_t trials = 50000;
  double d = 2.0;
  std::uint64_t b = 1;
  CountMode count_mode = CountMode::Approx;
  FiniteMode finite_mode = FiniteMode::Direct;
  KeyDistribution key_distribution = KeyDistribution::UniformPower;
  EnumerationLimits limits;
  unsigned threads = 1;
  bool record_timing = false;  // elapsed_s is 0 unless set, keeping output reproducible

  void validate() const;
};

inline constexpr std::uint64_t kDefaultInfiniteTrials = 50000;
inline constexpr std::uint64_t kDefaultFiniteTrials = 200000;

// Pr{D < d} per grid point; approx mode thresholds the volume-ratio estimate.
std::vector<OutageEstimate> estimate_p_out_infinite(const SweepSpec& spec);

// Pr{L_1 < d, ..., L_B < d} per grid point with exact finite-lattice counts.
std::vector<OutageEstimate> estimate_pf_out_finite(const SweepSpec& spec);

struct ChannelRealization {
  ComplexMatrix h;  // N_B x N_A
  ComplexMatrix g;  // N_E x N_A
};

ChannelRealization sample_channels(const UskConfig& cfg, RngStream& rng);

// Everything one encryption event produces, for the demo and property tests.
struct CryptogramRun {
  ChannelRealization channels;
  Precoder precoder;
  double r_max = 0.0;
  CryptogramSample sample;
};

// Draws (H, G), u from its prior, v from the key ball, and counts Eve's key
// space. In finite mode u is uniform over the QAM box; otherwise uniform over
// the square of half-width kDefaultInfinitePriorHalfWidth.
CryptogramRun simulate_cryptogram(const UskConfig& cfg, RngStream& rng,
                                  KeyDistribution key = KeyDistribution::UniformPower,
                                  EnumerationLimits limits = {});

// One grid point of a bound validation.
struct BoundCheck {
  std::string name;
  double grid_value = 0.0;
  BinomialEstimate estimate;
  double bound = 0.0;
  bool violation = false;
};

// Tail of Delta(d) against upsilon(rho/kappa) with P_v = rho^2 / phi^{2N_B/N_E}.
// A violation is a Wilson lower limit above the bound.
std::vector<BoundCheck> validate_lemma2(const BoundParams& p, const std::vector<double>& ratios,
                                        std::uint64_t trials, std::uint64_t seed,
                                        unsigned threads = 1);

// Pr{D < d} against fd_upper_bound at the same P_v. Exact counting for
// N_B <= 2, volume-ratio estimate otherwise.
std::vector<BoundCheck> validate_fd_bound(const BoundParams& p, const std::vector<double>& ratios,
                                          std::uint64_t trials, std::uint64_t seed,
                                          unsigned threads = 1);

// Empirical cdf of theta(pv) against the beta-product lower bound. A violation
// is a Wilson upper limit below the bound.
std::vector<BoundCheck> validate_lemma4(const BoundParams& p, double pv, double m,
                                        const std::vector<double>& xs, std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads = 1);

// CSV with the fixed column schema below, one row per estimate.
inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,n_a,n_b,n_e,pv,m,b,d,trials,successes,p_hat,ci_low,ci_high,mode,"
    "seed,elapsed_s";

void emit_csv(const std::vector<OutageEstimate>& results, std::ostream& out);
void emit_csv(const std::vector<OutageEstimate>& results, const std::filesystem::path& path);
std::vector<OutageEstimate> parse_csv(std::istream& in);

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace usk
