#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "usk/usk_codec.hpp"

namespace usk::cli {

// Flat key/value settings. Keys are the long flag names without dashes; a
// config file uses the same names. Lists are comma-separated.
class CliConfig {
public:
  CliConfig() = default;
  explicit CliConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  // Accepts a JSON object whose values are numbers, strings, booleans or
  // arrays of those. Throws std::invalid_argument on anything else.
  static CliConfig from_json_text(const std::string& text);
  static CliConfig from_json_file(const std::string& path);

  // Entries of `higher` replace ours.
  CliConfig merged_with(const CliConfig& higher) const;

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string str(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::uint64_t> counts(const std::string& key) const;
  // "inf" (or absent) selects the infinite constellation.
  std::optional<std::uint64_t> qam(const std::string& key) const;

  bool operator==(const CliConfig&) const = default;

private:
  std::map<std::string, std::string> values_;
};

// Builds and validates the system configuration from na/nb/ne/pv/m/sigma-b/seed.
UskConfig to_usk_config(const CliConfig& cfg);

// Layering used by every subcommand: defaults, then file, then flags.
CliConfig resolve(const CliConfig& defaults, const std::optional<CliConfig>& file,
                  const CliConfig& flags);

// Built-in defaults for a subcommand; throws std::invalid_argument for an
// unknown name.
CliConfig defaults_for(const std::string& command);

}  // namespace usk::cli
