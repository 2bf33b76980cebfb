#include "usk/cli_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "usk/errors.hpp"

namespace usk::cli {

namespace {

std::string scalar_to_string(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v.get<double>());
    return std::string(buf, res.ptr);
  }
  throw std::invalid_argument("config key '" + key + "' has an unsupported value type");
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
T parse_as(const std::string& text, const std::string& key) {
  T value{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw DomainError("invalid value '" + text + "' for --" + key);
  }
  return value;
}

}  // namespace

CliConfig CliConfig::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  CliConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) {
        if (!joined.empty()) joined += ',';
        joined += scalar_to_string(item, key);
      }
      cfg.values_[key] = joined;
    } else {
      cfg.values_[key] = scalar_to_string(value, key);
    }
  }
  return cfg;
}

CliConfig CliConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

CliConfig CliConfig::merged_with(const CliConfig& higher) const {
  CliConfig out = *this;
  for (const auto& [k, v] : higher.values_) out.values_[k] = v;
  return out;
}

std::string CliConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw DomainError("missing required setting --" + key);
  return it->second;
}

double CliConfig::real(const std::string& key) const { return parse_as<double>(str(key), key); }

std::int64_t CliConfig::integer(const std::string& key) const {
  return parse_as<std::int64_t>(str(key), key);
}

std::uint64_t CliConfig::count(const std::string& key) const {
  return parse_as<std::uint64_t>(str(key), key);
}

bool CliConfig::flag(const std::string& key) const {
  if (!has(key)) return false;
  const std::string v = str(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw DomainError("invalid boolean '" + v + "' for --" + key);
}

std::vector<double> CliConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(str(key))) out.push_back(parse_as<double>(item, key));
  if (out.empty()) throw DomainError("--" + key + " needs at least one value");
  return out;
}

std::vector<std::uint64_t> CliConfig::counts(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(str(key))) out.push_back(parse_as<std::uint64_t>(item, key));
  if (out.empty()) throw DomainError("--" + key + " needs at least one value");
  return out;
}

std::optional<std::uint64_t> CliConfig::qam(const std::string& key) const {
  if (!has(key) || str(key) == "inf") return std::nullopt;
  return count(key);
}

UskConfig to_usk_config(const CliConfig& cfg) {
  UskConfig out;
  out.n_a = static_cast<int>(cfg.integer("na"));
  out.n_b = static_cast<int>(cfg.integer("nb"));
  out.n_e = static_cast<int>(cfg.integer("ne"));
  if (cfg.has("pv")) out.pv = cfg.real("pv");
  out.m = cfg.qam("m");
  if (cfg.has("sigma-b")) out.sigma_b = cfg.real("sigma-b");
  if (cfg.has("seed")) out.seed = cfg.count("seed");
  out.validate();
  return out;
}

CliConfig resolve(const CliConfig& defaults, const std::optional<CliConfig>& file,
                  const CliConfig& flags) {
  CliConfig out = defaults;
  if (file) out = out.merged_with(*file);
  return out.merged_with(flags);
}

CliConfig defaults_for(const std::string& command) {
  std::map<std::string, std::string> common{
      {"seed", "1"}, {"threads", "1"}, {"timing", "false"}};
  std::map<std::string, std::string> specific;
  if (command == "bounds") {
    specific = {{"format", "text"}, {"na", "4"}, {"nb", "2"}, {"ne", "3"}, {"d", "2"},
                {"eps", "0.199"}};
  } else if (command == "outage-infinite") {
    specific = {{"format", "csv"},  {"na", "9"},        {"nb", "4"},
                {"ne", "8"},        {"d", "2,16777216"}, {"eps", "0.8,0.5,0.3,0.2,0.1,0.08"},
                {"trials", "50000"}, {"mode", "approx"}, {"key", "uniform-power"},
                {"node-budget", "100000000"}};
  } else if (command == "outage-finite") {
    specific = {{"format", "csv"},    {"na", "4"},         {"nb", "2"},
                {"ne", "3"},          {"d", "2"},          {"pv", "3.662"},
                {"m", "256"},         {"b", "1"},          {"trials", "200000"},
                {"mode", "direct"},   {"key", "uniform-power"}, {"node-budget", "100000000"}};
  } else if (command == "demo") {
    specific = {{"format", "text"}, {"na", "4"},       {"nb", "2"},
                {"ne", "3"},        {"pv", "3.662"},   {"m", "256"},
                {"sigma-b", "0"},   {"key", "uniform-power"}, {"node-budget", "100000000"}};
  } else if (command == "validate") {
    specific = {{"format", "text"}, {"which", "all"},  {"na", "4"},
                {"nb", "2"},        {"ne", "3"},       {"d", "2"},
                {"pv", "3.662"},    {"m", "256"},      {"trials", "10000"},
                {"ratio", "1.01,1.5,2,3"}, {"x", "0.25,0.5,1,1.5,2"}};
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }
  specific.insert(common.begin(), common.end());
  return CliConfig(std::move(specific));
}

}  // namespace usk::cli
