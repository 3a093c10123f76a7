#include "lrlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace lrlab {

namespace {

Config from_tree(const boost::property_tree::ptree& tree) {
  Config c;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      c.set(name, node.data());
      continue;
    }
    for (const auto& [key, leaf] : node) c.set(name + "." + key, leaf.data());
  }
  return c;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::load(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config: " + std::string(e.what()));
  }
  return from_tree(tree);
}

Config Config::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot parse config: " + std::string(e.what()));
  }
  return from_tree(tree);
}

std::string Config::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key: " + key);
  return trim(it->second);
}

double Config::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": expected a number, got '" + s + "'");
  }
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key " + key + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string s = get_string(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("config key " + key + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config key " + key + ": expected true or false, got '" + s + "'");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::string s = get_string(key);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad list entry '" + tok + "'");
    }
  }
  return out;
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

void Config::require(const std::vector<std::string>& keys) const {
  std::string missing;
  for (const auto& k : keys)
    if (!has(k)) missing += (missing.empty() ? "" : ", ") + k;
  if (!missing.empty()) throw ConfigError("missing config key(s): " + missing);
}

KernelConfig kernel_config(const Config& cfg) {
  cfg.require({"kernel.d", "kernel.alpha", "kernel.L", "kernel.M", "kernel.model"});
  KernelConfig k;
  k.spec.d = static_cast<int>(cfg.get_int("kernel.d"));
  k.spec.alpha = cfg.get_double("kernel.alpha");
  k.spec.L = cfg.get_double("kernel.L");
  try {
    k.spec.model = parse_model(cfg.get_string("kernel.model"));
  } catch (const KernelError& e) {
    throw ConfigError(std::string("kernel.model: ") + e.what());
  }
  k.M = cfg.get_int("kernel.M");
  k.tail_mass_cap = cfg.get_double_or("kernel.tail_mass_cap", kDefaultTailMassCap);
  if (k.spec.d < 1) throw ConfigError("kernel.d: must be >= 1");
  if (!(k.spec.alpha > 0)) throw ConfigError("kernel.alpha: must be > 0");
  if (!(k.spec.L >= 1)) throw ConfigError("kernel.L: must be >= 1");
  if (k.M < 4 || k.M % 2 != 0) throw ConfigError("kernel.M: must be even and >= 4");
  if (!(static_cast<double>(k.M) > 4 * k.spec.L)) throw ConfigError("kernel.M: must exceed 4L");
  if (!(k.tail_mass_cap > 0)) throw ConfigError("kernel.tail_mass_cap: must be positive");
  return k;
}

}  // namespace lrlab
