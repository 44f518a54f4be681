#include "codev/manifest.hpp"

#include <cstdio>

#include "codev/error.hpp"

#include "json.hpp"

namespace codev::manifest {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return std::string(s);
}

}  // namespace

Config Config::load(std::istream& in) {
  if (in.fail()) throw IoError("config: unreadable stream");
  Config cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw FormatError("config: line " + std::to_string(lineno) +
                        " is not `key = value`");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty())
      throw FormatError("config: empty key on line " + std::to_string(lineno));
    cfg.values[key] = value;
  }
  return cfg;
}

std::optional<std::string> Config::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::string Config::get_or(const std::string& key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stod(*v);
  } catch (const std::exception&) {
    throw FormatError("config: key '" + key + "' is not numeric");
  }
}

long Config::get_int(const std::string& key, long fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  try {
    return std::stol(*v);
  } catch (const std::exception&) {
    throw FormatError("config: key '" + key + "' is not an integer");
  }
}

std::string config_hash(const Config& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : config.values) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write(std::ostream& out, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["version"] = kVersion;
  j["seed"] = m.seed;
  j["config"] = m.effective.values;
  j["config_hash"] = config_hash(m.effective);
  j["decisions"] = m.decisions;
  j["outputs"] = m.outputs;
  j["counters"] = m.counters;
  out << j.dump(2) << '\n';
}

}  // namespace codev::manifest
