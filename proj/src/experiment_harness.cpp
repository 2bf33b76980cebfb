#include "usk/experiment_harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "usk/errors.hpp"

namespace usk {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Keep the ordering exact at the boundaries.
  ci.low = std::min(ci.low, p);
  ci.high = std::max(ci.high, p);
  return ci;
}

BinomialEstimate monte_carlo(std::uint64_t trials, std::uint64_t seed, unsigned threads,
                             const std::function<bool(std::uint64_t, RngStream&)>& event,
                             std::uint64_t stream_base) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  constexpr std::uint64_t kChunk = 256;
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> total{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    std::uint64_t local = 0;
    try {
      for (;;) {
        const std::uint64_t begin = next.fetch_add(kChunk);
        if (begin >= trials) break;
        const std::uint64_t end = std::min(trials, begin + kChunk);
        for (std::uint64_t t = begin; t < end; ++t) {
          RngStream rng(seed, stream_base + t);
          if (event(t, rng)) ++local;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(trials);
    }
    total.fetch_add(local);
  };

  if (threads == 1 || trials <= kChunk) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const unsigned n = static_cast<unsigned>(
        std::min<std::uint64_t>(threads, (trials + kChunk - 1) / kChunk));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  BinomialEstimate est;
  est.trials = trials;
  est.successes = total.load();
  est.p_hat = trials ? static_cast<double>(est.successes) / static_cast<double>(trials) : 0.0;
  est.ci = wilson_interval(est.successes, trials);
  return est;
}

void SweepSpec::validate() const {
  base.validate();
  if (grid.empty()) throw DomainError("sweep grid must be nonempty");
  if (trials < 1) throw DomainError("sweep needs at least one trial");
  if (!(d >= 1.0)) throw DomainError("target d must be >= 1");
  if (b < 1) throw DomainError("block count B must be >= 1");
}

ChannelRealization sample_channels(const UskConfig& cfg, RngStream& rng) {
  ChannelRealization ch;
  ch.h = sample_complex_gaussian(cfg.n_b, cfg.n_a, rng);
  ch.g = sample_complex_gaussian(cfg.n_e, cfg.n_a, rng);
  return ch;
}

namespace {

PlainVector sample_plain(const UskConfig& cfg, RngStream& rng) {
  PlainVector u(static_cast<std::size_t>(cfg.n_b));
  if (cfg.m) {
    const auto side = static_cast<std::uint64_t>(QamBox::for_size(*cfg.m).side);
    for (auto& g : u) {
      g.re = static_cast<std::int64_t>(rng.below(side));
      g.im = static_cast<std::int64_t>(rng.below(side));
    }
  } else {
    constexpr std::int64_t w = kDefaultInfinitePriorHalfWidth;
    for (auto& g : u) {
      g.re = static_cast<std::int64_t>(rng.below(2 * w + 1)) - w;
      g.im = static_cast<std::int64_t>(rng.below(2 * w + 1)) - w;
    }
  }
  return u;
}

// Eve-side quantities of one channel draw.
struct EveView {
  Precoder precoder;
  EveLattice lattice;
  ComplexMatrix gz;
};

EveView eve_view(const ChannelRealization& ch) {
  Precoder p = svd_split(ch.h);
  EveLattice lat(ch.g * p.v1);
  ComplexMatrix gz = ch.g * p.z;
  return EveView{std::move(p), std::move(lat), std::move(gz)};
}

UskConfig point_config(const SweepSpec& spec, double value, std::uint64_t& b) {
  UskConfig cfg = spec.base;
  b = spec.b;
  if (spec.param == "eps") {
    BoundParams bp{cfg.n_a, cfg.n_b, cfg.n_e, spec.d, value};
    cfg.pv = theorem2_power(bp);
  } else if (spec.param == "pv") {
    cfg.pv = value;
  } else if (spec.param == "b") {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw DomainError("sweep over B needs positive integers");
    }
    b = static_cast<std::uint64_t>(value);
  } else if (spec.param == "m") {
    if (!(value >= 4.0) || value != std::floor(value)) {
      throw DomainError("sweep over M needs integer QAM sizes");
    }
    cfg.m = static_cast<std::uint64_t>(value);
  } else {
    throw DomainError("unknown sweep parameter '" + spec.param + "'");
  }
  cfg.validate();
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

OutageEstimate make_estimate(const SweepSpec& spec, double value, const UskConfig& cfg,
                             std::uint64_t b, const BinomialEstimate& est, std::string mode) {
  OutageEstimate out;
  out.sweep_param = spec.param;
  out.sweep_value = value;
  out.config = cfg;
  out.b = b;
  out.d = spec.d;
  out.trials = est.trials;
  out.successes = est.successes;
  out.p_hat = est.p_hat;
  out.ci_low = est.ci.low;
  out.ci_high = est.ci.high;
  out.mode = std::move(mode);
  return out;
}

// L < d for one fresh encryption event drawn from rng.
bool finite_block_outage(const UskConfig& cfg, double d, KeyDistribution key,
                         EnumerationLimits limits, RngStream& rng) {
  const ChannelRealization ch = sample_channels(cfg, rng);
  const EveView view = eve_view(ch);
  const PlainVector u = sample_plain(cfg, rng);
  const ComplexVector v = sample_key_ball(cfg.n_a - cfg.n_b, cfg.pv, rng, key);
  const ComplexVector y = view.lattice.basis() * to_complex(u) + view.gz * v;
  const double radius = r_max(view.gz, cfg.pv);
  const std::uint64_t l = count_in_sphere(view.lattice, y, radius, cfg.box(), limits);
  return static_cast<double>(l) < d;
}

}  // namespace

CryptogramRun simulate_cryptogram(const UskConfig& cfg, RngStream& rng, KeyDistribution key,
                                  EnumerationLimits limits) {
  cfg.validate();
  CryptogramRun run;
  run.channels = sample_channels(cfg, rng);
  EveView view = eve_view(run.channels);
  run.precoder = view.precoder;
  CryptogramSample& s = run.sample;
  s.u = sample_plain(cfg, rng);
  s.v = sample_key_ball(cfg.n_a - cfg.n_b, cfg.pv, rng, key);
  s.x = encrypt(s.u, s.v, run.precoder);
  s.y = eve_observe(run.channels.g, s.x);
  s.z = bob_observe(run.channels.h, s.x, cfg.sigma_b, rng);
  run.r_max = r_max(view.gz, cfg.pv);
  s.d_count = count_in_sphere(view.lattice, s.y, run.r_max, std::nullopt, limits);
  s.k = effective_key_index(view.lattice, s.u, s.y, std::nullopt, limits);
  if (const auto box = cfg.box()) {
    s.l_count = count_in_sphere(view.lattice, s.y, run.r_max, box, limits);
    s.k_f = effective_key_index(view.lattice, s.u, s.y, box, limits);
  }
  return run;
}

std::vector<OutageEstimate> estimate_p_out_infinite(const SweepSpec& spec) {
  spec.validate();
  if (spec.count_mode == CountMode::Exact && spec.base.n_b > 2) {
    throw ResourceError("exact counting of D is limited to N_B <= 2");
  }
  std::vector<OutageEstimate> out;
  for (double value : spec.grid) {
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t b = 1;
    UskConfig cfg = point_config(spec, value, b);
    cfg.m.reset();
    BinomialEstimate est;
    if (spec.count_mode == CountMode::Approx) {
      // D~ depends only on (H, G, P_v); u and v are not drawn.
      est = monte_carlo(spec.trials, cfg.seed, spec.threads, [&](std::uint64_t, RngStream& rng) {
        const ChannelRealization ch = sample_channels(cfg, rng);
        const EveView view = eve_view(ch);
        const double r_eff = effective_radius(view.lattice, RadiusMode::StirlingApprox);
        return approx_d(r_max(view.gz, cfg.pv), r_eff, cfg.n_b) < spec.d;
      });
    } else {
      est = monte_carlo(spec.trials, cfg.seed, spec.threads, [&](std::uint64_t, RngStream& rng) {
        const ChannelRealization ch = sample_channels(cfg, rng);
        const EveView view = eve_view(ch);
        const PlainVector u = sample_plain(cfg, rng);
        const ComplexVector v = sample_key_ball(cfg.n_a - cfg.n_b, cfg.pv, rng,
                                                spec.key_distribution);
        const ComplexVector y = view.lattice.basis() * to_complex(u) + view.gz * v;
        const auto count =
            count_in_sphere(view.lattice, y, r_max(view.gz, cfg.pv), std::nullopt, spec.limits);
        return static_cast<double>(count) < spec.d;
      });
    }
    OutageEstimate row = make_estimate(spec, value, cfg, 1, est,
                                       spec.count_mode == CountMode::Approx ? "approx" : "exact");
    if (spec.record_timing) row.elapsed_s = seconds_since(start);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<OutageEstimate> estimate_pf_out_finite(const SweepSpec& spec) {
  spec.validate();
  if (!spec.base.m && spec.param != "m") {
    throw DomainError("finite-constellation outage needs a QAM size M");
  }
  std::vector<OutageEstimate> out;
  for (double value : spec.grid) {
    const auto start = std::chrono::steady_clock::now();
    std::uint64_t b = 1;
    const UskConfig cfg = point_config(spec, value, b);
    OutageEstimate row;
    if (spec.finite_mode == FiniteMode::Direct) {
      const auto est =
          monte_carlo(spec.trials, cfg.seed, spec.threads, [&](std::uint64_t, RngStream& rng) {
            for (std::uint64_t i = 0; i < b; ++i) {
              if (!finite_block_outage(cfg, spec.d, spec.key_distribution, spec.limits, rng)) {
                return false;
              }
            }
            return true;
          });
      row = make_estimate(spec, value, cfg, b, est, "direct");
    } else {
      // Independent blocks: P_F,out(d, B) = Pr{L < d}^B.
      const auto single =
          monte_carlo(spec.trials, cfg.seed, spec.threads, [&](std::uint64_t, RngStream& rng) {
            return finite_block_outage(cfg, spec.d, spec.key_distribution, spec.limits, rng);
          });
      row = make_estimate(spec, value, cfg, b, single, "factorized");
      const double power = static_cast<double>(b);
      row.p_hat = std::pow(single.p_hat, power);
      row.ci_low = std::pow(single.ci.low, power);
      row.ci_high = std::pow(single.ci.high, power);
    }
    if (spec.record_timing) row.elapsed_s = seconds_since(start);
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

double lemma_pv(const BoundParams& p, double ratio) {
  const double rho = ratio * kappa(p.d, p.n_e);
  return rho * rho / std::pow(phi(p.n_b, p.n_e), 2.0 * p.n_b / static_cast<double>(p.n_e));
}

UskConfig channel_config(const BoundParams& p, std::uint64_t seed) {
  UskConfig cfg;
  cfg.n_a = p.n_a;
  cfg.n_b = p.n_b;
  cfg.n_e = p.n_e;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

std::vector<BoundCheck> validate_lemma2(const BoundParams& p, const std::vector<double>& ratios,
                                        std::uint64_t trials, std::uint64_t seed,
                                        unsigned threads) {
  const UskConfig cfg = channel_config(p, seed);
  cfg.validate();
  std::vector<BoundCheck> out;
  for (double ratio : ratios) {
    const double pv = lemma_pv(p, ratio);
    const double threshold = std::pow(ratio, -static_cast<double>(p.n_b));
    BoundCheck check;
    check.name = "lemma2";
    check.grid_value = ratio;
    check.estimate = monte_carlo(trials, seed, threads, [&](std::uint64_t, RngStream& rng) {
      const ChannelRealization ch = sample_channels(cfg, rng);
      const Precoder pre = svd_split(ch.h);
      const double log_vol = gram_log_volume(ch.g * pre.v1);
      return delta(p.d, pv, log_vol, p.n_e) > threshold;
    });
    check.bound = upsilon(ratio, p.n_b, p.n_e);
    check.violation = check.estimate.ci.low > check.bound;
    out.push_back(check);
  }
  return out;
}

std::vector<BoundCheck> validate_fd_bound(const BoundParams& p, const std::vector<double>& ratios,
                                          std::uint64_t trials, std::uint64_t seed,
                                          unsigned threads) {
  const UskConfig base = channel_config(p, seed);
  base.validate();
  std::vector<BoundCheck> out;
  for (double ratio : ratios) {
    UskConfig cfg = base;
    cfg.pv = lemma_pv(p, ratio);
    BoundCheck check;
    check.name = p.n_b <= 2 ? "fd_exact" : "fd_approx";
    check.grid_value = ratio;
    check.estimate = monte_carlo(trials, seed, threads, [&](std::uint64_t, RngStream& rng) {
      const ChannelRealization ch = sample_channels(cfg, rng);
      const EveView view = eve_view(ch);
      const double radius = r_max(view.gz, cfg.pv);
      if (cfg.n_b > 2) {
        const double r_eff = effective_radius(view.lattice, RadiusMode::StirlingApprox);
        return approx_d(radius, r_eff, cfg.n_b) < p.d;
      }
      const PlainVector u = sample_plain(cfg, rng);
      const ComplexVector v = sample_key_ball(cfg.n_a - cfg.n_b, cfg.pv, rng,
                                                  KeyDistribution::UniformPower);
      const ComplexVector y = view.lattice.basis() * to_complex(u) + view.gz * v;
      return static_cast<double>(count_in_sphere(view.lattice, y, radius)) < p.d;
    });
    check.bound = fd_upper_bound(ratio, p.n_b, p.n_e);
    check.violation = check.estimate.ci.low > check.bound;
    out.push_back(check);
  }
  return out;
}

std::vector<BoundCheck> validate_lemma4(const BoundParams& p, double pv, double m,
                                        const std::vector<double>& xs, std::uint64_t trials,
                                        std::uint64_t seed, unsigned threads) {
  UskConfig cfg = channel_config(p, seed);
  cfg.pv = pv;
  cfg.validate();
  std::vector<BoundCheck> out;
  for (double x : xs) {
    BoundCheck check;
    check.name = "lemma4";
    check.grid_value = x;
    check.estimate = monte_carlo(trials, seed, threads, [&](std::uint64_t, RngStream& rng) {
      const ChannelRealization ch = sample_channels(cfg, rng);
      const EveView view = eve_view(ch);
      const double r_eff = effective_radius(view.lattice, RadiusMode::StirlingApprox);
      return theta(r_max(view.gz, pv), m, r_eff) < x;
    });
    check.bound = lemma4_cdf_lower_bound(x, p, pv, m);
    check.violation = check.estimate.ci.high < check.bound;
    out.push_back(check);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void emit_csv(const std::vector<OutageEstimate>& results, std::ostream& out) {
  if (results.empty()) throw DomainError("emit_csv: no results to write");
  out << kCsvHeader << '\n';
  for (const auto& r : results) {
    out << r.sweep_param << ',' << format_double(r.sweep_value) << ',' << r.config.n_a << ','
        << r.config.n_b << ',' << r.config.n_e << ',' << format_double(r.config.pv) << ','
        << (r.config.m ? std::to_string(*r.config.m) : std::string("inf")) << ',' << r.b << ','
        << format_double(r.d) << ',' << r.trials << ',' << r.successes << ','
        << format_double(r.p_hat) << ',' << format_double(r.ci_low) << ','
        << format_double(r.ci_high) << ',' << r.mode << ',' << r.config.seed << ','
        << format_double(r.elapsed_s) << '\n';
  }
}

void emit_csv(const std::vector<OutageEstimate>& results, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  emit_csv(results, file);
  file.flush();
  if (!file) throw std::runtime_error("write to '" + path.string() + "' failed");
}

namespace {

template <typename T>
T parse_number(const std::string& field, const char* column) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error(std::string("parse_csv: bad value '") + field + "' in column " +
                             column);
  }
  return value;
}

}  // namespace

std::vector<OutageEstimate> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("parse_csv: missing or unexpected header");
  }
  std::vector<OutageEstimate> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 17) throw std::runtime_error("parse_csv: expected 17 columns");
    OutageEstimate r;
    r.sweep_param = f[0];
    r.sweep_value = parse_number<double>(f[1], "sweep_value");
    r.config.n_a = parse_number<int>(f[2], "n_a");
    r.config.n_b = parse_number<int>(f[3], "n_b");
    r.config.n_e = parse_number<int>(f[4], "n_e");
    r.config.pv = parse_number<double>(f[5], "pv");
    if (f[6] == "inf") {
      r.config.m.reset();
    } else {
      r.config.m = parse_number<std::uint64_t>(f[6], "m");
    }
    r.b = parse_number<std::uint64_t>(f[7], "b");
    r.d = parse_number<double>(f[8], "d");
    r.trials = parse_number<std::uint64_t>(f[9], "trials");
    r.successes = parse_number<std::uint64_t>(f[10], "successes");
    r.p_hat = parse_number<double>(f[11], "p_hat");
    r.ci_low = parse_number<double>(f[12], "ci_low");
    r.ci_high = parse_number<double>(f[13], "ci_high");
    r.mode = f[14];
    r.config.seed = parse_number<std::uint64_t>(f[15], "seed");
    r.elapsed_s = parse_number<double>(f[16], "elapsed_s");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace usk
