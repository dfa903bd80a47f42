#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mima {

// Flat key=value configuration with dotted section keys, one entry per line;
// '#' starts a comment. Unknown keys are tolerated, missing required keys
// raise ConfigError naming the key.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Run manifest: config echo, seed, timestamps, produced files, failures.
// Written even when the run fails partway.
struct RunManifest {
  std::string config_echo;
  std::string version;
  std::uint64_t seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;

  void write(const std::string& path) const;
};

std::string timestamp_utc();

// Scientific notation with 17 significant digits; round-trips losslessly.
std::string format_full(double v);

}  // namespace mima
