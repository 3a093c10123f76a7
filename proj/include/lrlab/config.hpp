#pragma once

#include "lrlab/kernel.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrlab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// INI-style key/value file with sections. Keys are addressed as "section.key".
class Config {
 public:
  static Config load(const std::string& path);
  static Config parse(const std::string& text);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // Comma- or whitespace-separated list of reals.
  std::vector<double> get_list(const std::string& key) const;

  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;

  // Throws one ConfigError naming every absent key.
  void require(const std::vector<std::string>& keys) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Reads [kernel] d, alpha, L, M, model, tail_mass_cap.
struct KernelConfig {
  KernelSpec spec;
  std::int64_t M = 0;
  double tail_mass_cap = 0.1;
};

KernelConfig kernel_config(const Config& cfg);

}  // namespace lrlab
