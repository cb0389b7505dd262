#include "bicmb/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bicmb/numerics.hpp"

namespace bicmb {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw Error("config key '" + key + "': not a number: '" + text + "'");
  return v;
}

long long to_int(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw Error("config key '" + key + "': not an integer: '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']')
    throw Error("config key '" + key + "': expected a [list]");
  std::vector<std::string> items;
  std::istringstream in(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(number) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw Error("config line " + std::to_string(number) + ": empty key");
    if (cfg.values_.count(key)) throw Error("config key '" + key + "' given twice");
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

long long ConfigFile::get_int(const std::string& key, long long fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_int(key, it->second);
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  // allow 1e6 style for trial counts
  const double v = to_double(key, it->second);
  if (v < 0 || v != std::floor(v) || v > 1.8e19) throw Error("config key '" + key + "': not a count");
  return static_cast<std::uint64_t>(v);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& v = it->second;
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw Error("config key '" + key + "': expected on/off");
}

std::vector<double> ConfigFile::get_doubles(const std::string& key,
                                            const std::vector<double>& fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto& text = it->second;
  std::vector<double> out;
  if (!text.empty() && text.front() != '[') {
    // start:step:stop
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw Error("config key '" + key + "': expected [list] or start:step:stop");
    const double start = to_double(key, parts[0]), step = to_double(key, parts[1]),
                 stop = to_double(key, parts[2]);
    if (!(step > 0) || stop < start) throw Error("config key '" + key + "': bad range");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) out.push_back(start + i * step);
    return out;
  }
  for (const auto& item : split_list(key, text)) out.push_back(to_double(key, item));
  return out;
}

std::vector<int> ConfigFile::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(key, it->second)) out.push_back(static_cast<int>(to_int(key, item)));
  return out;
}

std::vector<std::string> ConfigFile::get_strings(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  read_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return split_list(key, it->second);
}

std::vector<std::string> ConfigFile::unused() const {
  std::vector<std::string> out;
  for (const auto& [key, value] : values_)
    if (!read_.count(key)) out.push_back(key);
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("format failure");
  return std::string(buf, ptr);
}

}  // namespace bicmb
