// usk_cli: bounds calculator, encryption demo and Monte Carlo outage drivers
// for the unshared-secret-key scheme.
//
// Exit codes: 0 success, 1 runtime/resource error or bound violation,
// 2 usage/validation error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "usk/cli_config.hpp"
#include "usk/errors.hpp"
#include "usk/experiment_harness.hpp"
#include "usk/lattice_counter.hpp"
#include "usk/secrecy_bounds.hpp"
#include "usk/usk_codec.hpp"

namespace {

using usk::cli::CliConfig;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string show(const usk::PlainVector& u) {
  std::string out = "(";
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(u[i].re) + (u[i].im < 0 ? "-" : "+") +
           std::to_string(u[i].im < 0 ? -u[i].im : u[i].im) + "i";
  }
  return out + ")";
}

usk::KeyDistribution key_distribution(const CliConfig& cfg) {
  const std::string k = cfg.has("key") ? cfg.str("key") : "uniform-power";
  if (k == "uniform-power") return usk::KeyDistribution::UniformPower;
  if (k == "uniform-ball") return usk::KeyDistribution::UniformBall;
  if (k == "fixed-norm") return usk::KeyDistribution::FixedNorm;
  throw usk::DomainError("unknown --key '" + k +
                         "' (expected uniform-power, uniform-ball or fixed-norm)");
}

usk::EnumerationLimits limits(const CliConfig& cfg) {
  usk::EnumerationLimits l;
  if (cfg.has("node-budget")) l.node_budget = cfg.count("node-budget");
  return l;
}

bool csv_format(const CliConfig& cfg) {
  const std::string f = cfg.str("format");
  if (f == "csv") return true;
  if (f == "text") return false;
  throw usk::DomainError("unknown --format '" + f + "' (expected text or csv)");
}

unsigned threads(const CliConfig& cfg) { return static_cast<unsigned>(cfg.count("threads")); }

void print_rows(const std::vector<usk::OutageEstimate>& rows, bool csv, std::ostream& out) {
  if (csv) {
    usk::emit_csv(rows, out);
    return;
  }
  for (const auto& r : rows) {
    out << r.sweep_param << "=" << sci(r.sweep_value) << "  d=" << sci(r.d)
        << "  pv=" << fixed(r.config.pv, 4)
        << "  m=" << (r.config.m ? std::to_string(*r.config.m) : std::string("inf"))
        << "  b=" << r.b << "  trials=" << r.trials << "  successes=" << r.successes
        << "  p_hat=" << sci(r.p_hat) << "  ci=[" << sci(r.ci_low) << ", " << sci(r.ci_high)
        << "]  mode=" << r.mode << "\n";
  }
}

int cmd_bounds(const CliConfig& cfg, std::ostream& out) {
  usk::BoundParams p{static_cast<int>(cfg.integer("na")), static_cast<int>(cfg.integer("nb")),
                     static_cast<int>(cfg.integer("ne")), cfg.real("d"), cfg.real("eps")};
  p.validate();
  const double k = usk::kappa(p.d, p.n_e);
  const double f = usk::phi(p.n_b, p.n_e);
  const double pv = usk::theorem2_power(p);
  const double m_min = usk::theorem3_constellation(p);
  const std::uint64_t m_qam = usk::next_square_qam(m_min);
  std::uint64_t m_used = m_qam;
  if (const auto m = cfg.qam("m")) {
    usk::QamBox::for_size(*m);
    m_used = *m;
  }
  const double r = usk::power_ratio(pv, static_cast<double>(m_used), p.n_b);

  if (csv_format(cfg)) {
    out << "n_a,n_b,n_e,d,eps,kappa,phi,n,n_min,pv,m_min,m_qam,m,power_ratio\n";
    out << p.n_a << ',' << p.n_b << ',' << p.n_e << ',' << usk::format_double(p.d) << ','
        << usk::format_double(p.eps) << ',' << usk::format_double(k) << ','
        << usk::format_double(f) << ',' << p.n() << ',' << p.n_min() << ','
        << usk::format_double(pv) << ',' << usk::format_double(m_min) << ',' << m_qam << ','
        << m_used << ',' << usk::format_double(r) << '\n';
    return 0;
  }
  out << "N_A=" << p.n_a << " N_B=" << p.n_b << " N_E=" << p.n_e << " d=" << sci(p.d)
      << " eps=" << sci(p.eps) << "\n";
  out << "kappa(d)          " << fixed(k) << "\n";
  out << "Phi               " << fixed(f) << "\n";
  out << "N                 " << p.n() << "\n";
  out << "N_min             " << p.n_min() << "\n";
  out << "P_v               " << fixed(pv, 4) << "\n";
  out << "M_min             " << fixed(m_min, 4) << "\n";
  out << "M (square QAM)    " << m_qam << "\n";
  out << "power ratio r     " << fixed(r) << " (" << fixed(100.0 * r, 2) << "% at M=" << m_used
      << ")\n";
  return 0;
}

int cmd_outage_infinite(const CliConfig& cfg, std::ostream& out) {
  usk::SweepSpec spec;
  spec.base = usk::cli::to_usk_config(cfg);
  spec.base.m.reset();
  spec.param = "eps";
  spec.grid = cfg.reals("eps");
  spec.trials = cfg.count("trials");
  const std::string mode = cfg.str("mode");
  if (mode == "approx") {
    spec.count_mode = usk::CountMode::Approx;
  } else if (mode == "exact") {
    spec.count_mode = usk::CountMode::Exact;
  } else {
    throw usk::DomainError("unknown --mode '" + mode + "' (expected approx or exact)");
  }
  spec.key_distribution = key_distribution(cfg);
  spec.limits = limits(cfg);
  spec.threads = threads(cfg);
  spec.record_timing = cfg.flag("timing");
  for (double e : spec.grid) {
    if (!(e > 0.0 && e < 1.0)) throw usk::DomainError("--eps values must lie in (0, 1)");
  }
  std::vector<usk::OutageEstimate> rows;
  for (double d : cfg.reals("d")) {
    spec.d = d;
    if (!(d >= 2.0)) throw usk::DomainError("--d values must be >= 2");
    auto part = usk::estimate_p_out_infinite(spec);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  print_rows(rows, csv_format(cfg), out);
  return 0;
}

int cmd_outage_finite(const CliConfig& cfg, std::ostream& out) {
  usk::SweepSpec spec;
  CliConfig base = cfg;
  const auto m_values = cfg.counts("m");
  base.set("m", std::to_string(m_values.front()));
  spec.base = usk::cli::to_usk_config(base);
  spec.param = "b";
  for (auto b : cfg.counts("b")) spec.grid.push_back(static_cast<double>(b));
  spec.trials = cfg.count("trials");
  spec.d = cfg.real("d");
  if (!(spec.d >= 2.0)) throw usk::DomainError("--d must be >= 2");
  const std::string mode = cfg.str("mode");
  if (mode == "direct") {
    spec.finite_mode = usk::FiniteMode::Direct;
  } else if (mode == "factorized") {
    spec.finite_mode = usk::FiniteMode::Factorized;
  } else {
    throw usk::DomainError("unknown --mode '" + mode + "' (expected direct or factorized)");
  }
  spec.key_distribution = key_distribution(cfg);
  spec.limits = limits(cfg);
  spec.threads = threads(cfg);
  spec.record_timing = cfg.flag("timing");
  std::vector<usk::OutageEstimate> rows;
  for (auto m : m_values) {
    spec.base.m = m;
    spec.base.validate();
    auto part = usk::estimate_pf_out_finite(spec);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  print_rows(rows, csv_format(cfg), out);
  return 0;
}

int cmd_demo(const CliConfig& cfg, std::ostream& out) {
  const usk::UskConfig sys = usk::cli::to_usk_config(cfg);
  const auto lim = limits(cfg);
  usk::RngStream rng(sys.seed, 0);
  const usk::CryptogramRun run = usk::simulate_cryptogram(sys, rng, key_distribution(cfg), lim);
  const auto& s = run.sample;
  const auto box = sys.box();
  const usk::PlainVector decoded = usk::bob_decode(s.z, run.channels.h, run.precoder, box);

  double equivocation = 0.0;
  if (s.l_count) {
    equivocation = usk::equivocation_bits(*s.l_count);
  } else {
    // Posterior over the candidates in the sphere under the uniform box prior.
    usk::EveLattice lat(run.channels.g * run.precoder.v1);
    std::vector<double> weights;
    const std::int64_t w = usk::kDefaultInfinitePriorHalfWidth;
    usk::for_each_in_sphere(lat, s.y, run.r_max, std::nullopt, lim, [&](const usk::PlainVector& c) {
      bool inside = true;
      for (const auto& g : c) inside = inside && g.re >= -w && g.re <= w && g.im >= -w && g.im <= w;
      weights.push_back(inside ? 1.0 : 0.0);
    });
    equivocation = usk::equivocation_bits(weights);
  }

  if (csv_format(cfg)) {
    out << "u,v_norm_sq,r_max,k,k_f,d_count,l_count,equivocation_bits,decoded,status\n";
    out << '"' << show(s.u) << "\"," << usk::format_double(s.v.squaredNorm()) << ','
        << usk::format_double(run.r_max) << ',' << s.k << ','
        << (s.k_f ? std::to_string(*s.k_f) : "") << ',' << s.d_count << ','
        << (s.l_count ? std::to_string(*s.l_count) : "") << ','
        << usk::format_double(equivocation) << ",\"" << show(decoded) << "\","
        << (decoded == s.u ? "PASS" : "FAIL") << '\n';
    return 0;
  }
  out << "N_A=" << sys.n_a << " N_B=" << sys.n_b << " N_E=" << sys.n_e
      << " P_v=" << fixed(sys.pv, 4)
      << " M=" << (sys.m ? std::to_string(*sys.m) : std::string("inf"))
      << " sigma_B^2=" << sci(sys.sigma_b) << " seed=" << sys.seed << "\n";
  out << "u                   " << show(s.u) << "\n";
  out << "|v|^2               " << fixed(s.v.squaredNorm()) << "\n";
  out << "|x|^2               " << fixed(s.x.squaredNorm()) << "\n";
  out << "R_max               " << fixed(run.r_max) << "\n";
  out << "D                   " << s.d_count << "\n";
  out << "k                   " << s.k << "\n";
  if (s.l_count) {
    out << "L                   " << *s.l_count << "\n";
    out << "k_F                 " << *s.k_f << "\n";
  }
  out << "equivocation_bits   " << fixed(equivocation) << "\n";
  out << "bob_decoded         " << show(decoded) << "\n";
  out << (decoded == s.u ? "PASS" : "FAIL") << ": Bob's estimate "
      << (decoded == s.u ? "equals" : "differs from") << " u\n";
  return 0;
}

int cmd_validate(const CliConfig& cfg, std::ostream& out) {
  const std::string which = cfg.str("which");
  if (which != "lemma2" && which != "lemma4" && which != "fd" && which != "all") {
    throw usk::DomainError("unknown --which '" + which + "' (expected lemma2, lemma4, fd or all)");
  }
  usk::BoundParams p{static_cast<int>(cfg.integer("na")), static_cast<int>(cfg.integer("nb")),
                     static_cast<int>(cfg.integer("ne")), cfg.real("d"), 0.5};
  p.validate();
  const auto trials = cfg.count("trials");
  const auto seed = cfg.count("seed");
  const unsigned n_threads = threads(cfg);
  std::vector<usk::BoundCheck> checks;
  auto append = [&](std::vector<usk::BoundCheck> part) {
    checks.insert(checks.end(), part.begin(), part.end());
  };
  if (which == "lemma2" || which == "all") {
    append(usk::validate_lemma2(p, cfg.reals("ratio"), trials, seed, n_threads));
  }
  if (which == "fd" || which == "all") {
    std::vector<double> ratios;
    for (double r : cfg.reals("ratio")) {
      if (r > 1.0) ratios.push_back(r);
    }
    append(usk::validate_fd_bound(p, ratios, trials, seed, n_threads));
  }
  if (which == "lemma4" || which == "all") {
    const auto m = cfg.qam("m");
    if (!m) throw usk::DomainError("lemma4 validation needs a finite --m");
    usk::QamBox::for_size(*m);
    append(usk::validate_lemma4(p, cfg.real("pv"), static_cast<double>(*m), cfg.reals("x"),
                                trials, seed, n_threads));
  }
  bool violated = false;
  const bool csv = csv_format(cfg);
  if (csv) out << "check,grid_value,trials,successes,empirical,ci_low,ci_high,bound,status\n";
  for (const auto& c : checks) {
    violated = violated || c.violation;
    const char* status = c.violation ? "VIOLATION" : "OK";
    if (csv) {
      out << c.name << ',' << usk::format_double(c.grid_value) << ',' << c.estimate.trials << ','
          << c.estimate.successes << ',' << usk::format_double(c.estimate.p_hat) << ','
          << usk::format_double(c.estimate.ci.low) << ','
          << usk::format_double(c.estimate.ci.high) << ',' << usk::format_double(c.bound) << ','
          << status << '\n';
    } else {
      out << c.name << (c.name == "lemma4" ? "  x=" : "  rho/kappa=") << sci(c.grid_value)
          << "  empirical=" << sci(c.estimate.p_hat) << "  ci=[" << sci(c.estimate.ci.low)
          << ", " << sci(c.estimate.ci.high) << "]  bound=" << sci(c.bound) << "  " << status
          << "\n";
    }
  }
  return violated ? kExitRuntime : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unshared-secret-key MIMO wiretap toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  // Every setting is captured as text and layered as defaults < file < flags.
  std::map<std::string, std::string> raw;
  std::map<std::string, CLI::Option*> options;
  auto add = [&](CLI::App* where, const std::string& key, const std::string& help) {
    options[key] = where->add_option("--" + key, raw[key], help);
  };

  std::string config_path;
  app.add_option("--config", config_path, "JSON file with flag names as keys");
  add(&app, "seed", "RNG seed (u64)");
  add(&app, "format", "text or csv");
  add(&app, "out", "output path (default stdout)");
  add(&app, "threads", "worker threads; never changes results");
  bool timing = false;
  auto* timing_opt = app.add_flag("--timing", timing, "record wall-clock seconds in elapsed_s");

  struct Sub {
    const char* name;
    const char* help;
    std::vector<std::pair<const char*, const char*>> keys;
  };
  const std::vector<Sub> subs = {
      {"bounds", "closed-form power and constellation prescriptions",
       {{"na", "transmit antennas"}, {"nb", "Bob antennas"}, {"ne", "Eve antennas"},
        {"d", "target key-space size"}, {"eps", "outage target"},
        {"m", "QAM size for the power ratio"}}},
      {"outage-infinite", "Monte Carlo Pr{D < d} over an eps grid",
       {{"na", ""}, {"nb", ""}, {"ne", ""}, {"d", "comma list of targets"},
        {"eps", "comma list"}, {"trials", ""}, {"mode", "approx or exact"},
        {"key", "uniform-power, uniform-ball or fixed-norm"}, {"node-budget", ""}}},
      {"outage-finite", "Monte Carlo P_F,out(d, B) for finite QAM",
       {{"na", ""}, {"nb", ""}, {"ne", ""}, {"d", ""}, {"pv", "peak AN power"},
        {"m", "comma list of QAM sizes"}, {"b", "comma list of block counts"}, {"trials", ""},
        {"mode", "direct or factorized"}, {"key", ""}, {"node-budget", ""}}},
      {"demo", "one encryption event end to end",
       {{"na", ""}, {"nb", ""}, {"ne", ""}, {"pv", ""}, {"m", "QAM size or inf"},
        {"sigma-b", "Bob noise variance"}, {"key", ""}, {"node-budget", ""}}},
      {"validate", "Monte Carlo checks of the analytic bounds",
       {{"which", "lemma2, lemma4, fd or all"}, {"na", ""}, {"nb", ""}, {"ne", ""}, {"d", ""},
        {"pv", "AN power for lemma4"}, {"m", "QAM size for lemma4"}, {"trials", ""},
        {"ratio", "rho/kappa grid"}, {"x", "lemma4 grid"}}},
  };
  std::map<std::string, std::map<std::string, std::string>> sub_raw;
  std::map<std::string, std::map<std::string, CLI::Option*>> sub_opts;
  for (const auto& s : subs) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    for (const auto& [key, help] : s.keys) {
      sub_opts[s.name][key] = cmd->add_option(std::string("--") + key, sub_raw[s.name][key], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::ostringstream buffer;
  int code = 0;
  try {
    CliConfig flags;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) flags.set(key, raw[key]);
    }
    for (const auto& [key, opt] : sub_opts[command]) {
      if (opt->count() > 0) flags.set(key, sub_raw[command][key]);
    }
    if (timing_opt->count() > 0) flags.set("timing", timing ? "true" : "false");
    std::optional<CliConfig> file;
    if (!config_path.empty()) file = CliConfig::from_json_file(config_path);
    const CliConfig cfg = usk::cli::resolve(usk::cli::defaults_for(command), file, flags);

    if (command == "bounds") {
      code = cmd_bounds(cfg, buffer);
    } else if (command == "outage-infinite") {
      code = cmd_outage_infinite(cfg, buffer);
    } else if (command == "outage-finite") {
      code = cmd_outage_finite(cfg, buffer);
    } else if (command == "demo") {
      code = cmd_demo(cfg, buffer);
    } else {
      code = cmd_validate(cfg, buffer);
    }

    if (cfg.has("out") && !cfg.str("out").empty() && cfg.str("out") != "-") {
      const std::string path = cfg.str("out");
      std::ofstream file_out(path, std::ios::binary);
      if (!file_out) throw std::runtime_error("cannot open '" + path + "' for writing");
      file_out << buffer.str();
      if (!file_out.flush()) throw std::runtime_error("write to '" + path + "' failed");
    } else {
      std::cout << buffer.str() << std::flush;
    }
  } catch (const usk::ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {  // DimensionError, config errors
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {  // DomainError, LengthError
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return code;
}
