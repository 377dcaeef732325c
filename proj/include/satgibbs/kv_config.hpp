#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace satgibbs {

// Sectioned `key = value` text. Every read is recorded so unknown keys can be rejected and the
// resolved configuration (defaults included) can be echoed into output headers.
class KvConfig {
 public:
  static KvConfig parse(std::istream& is, const std::string& origin = "<config>");
  static KvConfig load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::optional<std::string>& fallback = std::nullopt) const;
  double get_double(const std::string& section, const std::string& key,
                    const std::optional<double>& fallback = std::nullopt) const;
  int get_int(const std::string& section, const std::string& key, const std::optional<int>& fallback = std::nullopt) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key,
                        const std::optional<std::uint64_t>& fallback = std::nullopt) const;
  bool get_bool(const std::string& section, const std::string& key,
                const std::optional<bool>& fallback = std::nullopt) const;
  // Comma-separated list; an empty value yields an empty list.
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::optional<std::vector<double>>& fallback = std::nullopt) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key,
                            const std::optional<std::vector<int>>& fallback = std::nullopt) const;

  // Path value resolved against the directory of the config file.
  std::string get_path(const std::string& section, const std::string& key,
                       const std::optional<std::string>& fallback = std::nullopt) const;

  // Throws ValidationError naming every key present in the text that was never read.
  void reject_unknown() const;
  // Same for the `strict` sections; `tolerated` sections are skipped and any other section is rejected.
  void reject_unknown(const std::vector<std::string>& strict, const std::vector<std::string>& tolerated = {}) const;
  // `section.key = value` for every value read, in sorted order.
  std::string resolved() const;
  const std::string& origin() const { return origin_; }

  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::string raw(const std::string& section, const std::string& key, const std::optional<std::string>& fallback) const;

  std::string origin_;
  std::string base_dir_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  mutable std::map<std::string, std::string> resolved_;
  mutable std::set<std::string> read_;
};

}  // namespace satgibbs
