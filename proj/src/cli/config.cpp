#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include "geoqm/cli.hpp"

namespace geoqm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

}  // namespace

Settings parse_config(std::istream& in, const std::string& origin) {
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw Error(Errc::config, where + ": expected key = value");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error(Errc::config, where + ": empty key");
    if (key.find_first_of(" \t") != std::string::npos) throw Error(Errc::config, where + ": key contains blanks");
    if (!out.emplace(key, value).second) throw Error(Errc::config, where + ": duplicate key '" + key + "'");
  }
  return out;
}

Settings load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config, "cannot read config file " + path.string());
  return parse_config(in, path.string());
}

Settings merge(const Settings& base, const Settings& overrides) {
  Settings out = base;
  for (const auto& [k, v] : overrides) out[normalize_key(k)] = v;
  return out;
}

}  // namespace geoqm::cli
