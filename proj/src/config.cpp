#include "mima/config.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "mima/errors.hpp"

namespace mima {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not key=value");
    cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

std::string Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not a number: " + v);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    return std::stol(v);
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + " is not an integer: " + v);
  }
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key " + key + " is not a boolean: " + v);
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  out << "version = " << version << "\n";
  out << "seed = " << seed << "\n";
  out << "started = " << started << "\n";
  out << "finished = " << finished << "\n";
  for (const auto& o : outputs) out << "output = " << o << "\n";
  for (const auto& f : failures) out << "failure = " << f << "\n";
  out << "# config echo\n";
  std::istringstream echo(config_echo);
  std::string line;
  while (std::getline(echo, line)) out << "## " << line << "\n";
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace mima
