#include "satgibbs/kv_config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string full_key(const std::string& section, const std::string& key) { return section + "." + key; }

template <class T, class Parse>
T parse_value(const std::string& name, const std::string& text, Parse parse) {
  try {
    std::size_t used = 0;
    T v = parse(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config key " + name + ": cannot parse '" + text + "'");
  }
}

// Shortest text that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

KvConfig KvConfig::parse(std::istream& is, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      require(line.back() == ']', where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      require(!section.empty(), where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    require(eq != std::string::npos, where + ": expected key = value");
    require(!section.empty(), where + ": key outside any section");
    const auto key = trim(line.substr(0, eq));
    require(!key.empty(), where + ": empty key");
    require(!cfg.values_[section].count(key), where + ": duplicate key " + full_key(section, key));
    cfg.values_[section][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file " + path);
  auto cfg = parse(in, path);
  cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

bool KvConfig::has(const std::string& section, const std::string& key) const {
  const auto it = values_.find(section);
  return it != values_.end() && it->second.count(key);
}

bool KvConfig::has_section(const std::string& section) const { return values_.count(section) > 0; }

void KvConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

std::string KvConfig::raw(const std::string& section, const std::string& key,
                          const std::optional<std::string>& fallback) const {
  const auto name = full_key(section, key);
  read_.insert(name);
  std::string v;
  if (has(section, key))
    v = values_.at(section).at(key);
  else if (fallback)
    v = *fallback;
  else
    throw ValidationError("missing config key " + name);
  resolved_[name] = v;
  return v;
}

std::string KvConfig::get_string(const std::string& section, const std::string& key,
                                 const std::optional<std::string>& fallback) const {
  return raw(section, key, fallback);
}

double KvConfig::get_double(const std::string& section, const std::string& key,
                            const std::optional<double>& fallback) const {
  std::optional<std::string> fb;
  if (fallback) fb = shortest(*fallback);
  const auto text = raw(section, key, fb);
  const double v = parse_value<double>(full_key(section, key), text,
                                       [](const std::string& s, std::size_t* n) { return std::stod(s, n); });
  require(std::isfinite(v), "config key " + full_key(section, key) + " must be finite");
  return v;
}

int KvConfig::get_int(const std::string& section, const std::string& key, const std::optional<int>& fallback) const {
  const auto text = raw(section, key, fallback ? std::optional<std::string>(std::to_string(*fallback)) : std::nullopt);
  return parse_value<int>(full_key(section, key), text, [](const std::string& s, std::size_t* n) { return std::stoi(s, n); });
}

std::uint64_t KvConfig::get_u64(const std::string& section, const std::string& key,
                                const std::optional<std::uint64_t>& fallback) const {
  const auto text = raw(section, key, fallback ? std::optional<std::string>(std::to_string(*fallback)) : std::nullopt);
  require(!text.empty() && text.front() != '-', "config key " + full_key(section, key) + " must be nonnegative");
  return parse_value<std::uint64_t>(full_key(section, key), text,
                                    [](const std::string& s, std::size_t* n) { return std::stoull(s, n); });
}

bool KvConfig::get_bool(const std::string& section, const std::string& key, const std::optional<bool>& fallback) const {
  const auto text =
      raw(section, key, fallback ? std::optional<std::string>(*fallback ? "true" : "false") : std::nullopt);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ValidationError("config key " + full_key(section, key) + ": expected a boolean, got '" + text + "'");
}

std::vector<double> KvConfig::get_doubles(const std::string& section, const std::string& key,
                                          const std::optional<std::vector<double>>& fallback) const {
  std::optional<std::string> fb;
  if (fallback) {
    std::string text;
    for (std::size_t k = 0; k < fallback->size(); ++k) text += (k ? "," : "") + shortest((*fallback)[k]);
    fb = text;
  }
  std::vector<double> out;
  for (const auto& item : split_list(raw(section, key, fb)))
    out.push_back(parse_value<double>(full_key(section, key), item,
                                      [](const std::string& s, std::size_t* n) { return std::stod(s, n); }));
  return out;
}

std::vector<int> KvConfig::get_ints(const std::string& section, const std::string& key,
                                    const std::optional<std::vector<int>>& fallback) const {
  std::optional<std::string> fb;
  if (fallback) {
    std::string s;
    for (std::size_t k = 0; k < fallback->size(); ++k) s += (k ? "," : "") + std::to_string((*fallback)[k]);
    fb = s;
  }
  std::vector<int> out;
  for (const auto& item : split_list(raw(section, key, fb)))
    out.push_back(parse_value<int>(full_key(section, key), item,
                                   [](const std::string& s, std::size_t* n) { return std::stoi(s, n); }));
  return out;
}

std::string KvConfig::get_path(const std::string& section, const std::string& key,
                               const std::optional<std::string>& fallback) const {
  const auto text = raw(section, key, fallback);
  if (text.empty()) return text;
  std::filesystem::path p(text);
  if (p.is_relative() && !base_dir_.empty()) p = std::filesystem::path(base_dir_) / p;
  return p.string();
}

void KvConfig::reject_unknown() const {
  std::vector<std::string> all;
  for (const auto& kv : values_) all.push_back(kv.first);
  reject_unknown(all);
}

void KvConfig::reject_unknown(const std::vector<std::string>& strict, const std::vector<std::string>& tolerated) const {
  const auto listed = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  std::vector<std::string> unknown;
  for (const auto& [section, kv] : values_) {
    if (listed(tolerated, section)) continue;
    require(listed(strict, section), "unknown config section [" + section + "]");
    for (const auto& [key, value] : kv)
      if (!read_.count(full_key(section, key))) unknown.push_back(full_key(section, key));
  }
  if (!unknown.empty()) {
    std::string msg = "unknown config key";
    msg += unknown.size() > 1 ? "s:" : ":";
    for (const auto& u : unknown) msg += " " + u;
    throw ValidationError(msg);
  }
}

std::string KvConfig::resolved() const {
  std::string out;
  for (const auto& [name, value] : resolved_) out += name + " = " + value + "\n";
  return out;
}

}  // namespace satgibbs
