#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace codev::manifest {

inline constexpr const char* kVersion = "0.1.0";

// Flat key/value config. File format: one `key = value` per line,
// '#' starts a comment.
struct Config {
  std::map<std::string, std::string> values;

  static Config load(std::istream& in);

  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key, long fallback) const;
  void set(const std::string& key, std::string value) {
    values[key] = std::move(value);
  }
};

// FNV-1a over the canonical (sorted) key=value rendering.
std::string config_hash(const Config& config);

// Every run writes one of these next to its outputs: enough to rerun the
// analysis byte-identically.
struct RunManifest {
  std::string command;
  Config effective;  // all effective values after flag overrides
  std::uint64_t seed = 0;
  std::vector<std::string> decisions;  // documented analysis choices
  std::map<std::string, std::string> outputs;
  std::map<std::string, std::string> counters;
};

void write(std::ostream& out, const RunManifest& m);

}  // namespace codev::manifest
