#pragma once

// Flat key = value configuration. Keys may be dotted (mixture.1.delta);
// '#' starts a comment. Every key can be overridden from the command line.

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bayesop/errors.hpp"

namespace bayesop::config {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'))
      return false;
  return k.find("..") == std::string::npos;
}

}  // namespace detail

class Config {
 public:
  struct Entry {
    std::string value;
    std::string origin;  // "file:line" or "--flag"
  };

  static Config parse(std::istream& in, const std::string& source) {
    Config cfg;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
      const auto hash = line.find('#');
      const std::string body = detail::trim(std::string_view(line).substr(0, hash));
      if (body.empty()) continue;
      const std::string where = source + ":" + std::to_string(n);
      const auto eq = body.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Validation, where + ": expected 'key = value'");
      const std::string key = detail::trim(std::string_view(body).substr(0, eq));
      const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
      if (!detail::valid_key(key)) fail(ErrorKind::Validation, where + ": bad key '" + key + "'");
      if (cfg.entries_.count(key))
        fail(ErrorKind::Validation, where + ": duplicate key '" + key + "'");
      cfg.entries_[key] = {value, where};
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(ErrorKind::Validation, "cannot open config file " + path);
    Config cfg = parse(f, path);
    cfg.dir_ = std::filesystem::path(path).parent_path().string();
    return cfg;
  }

  /// Apply "--key value" and "--key=value" pairs.
  void apply_overrides(const std::vector<std::string>& args) {
    for (size_t i = 0; i < args.size(); ++i) {
      const std::string& a = args[i];
      if (a.rfind("--", 0) != 0) fail(ErrorKind::Validation, "unexpected argument '" + a + "'");
      std::string key = a.substr(2), value;
      if (const auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key.resize(eq);
      } else {
        if (i + 1 >= args.size()) fail(ErrorKind::Validation, a + ": missing value");
        value = args[++i];
      }
      if (!detail::valid_key(key)) fail(ErrorKind::Validation, "bad option '" + a + "'");
      entries_[key] = {value, "--" + key};
    }
  }

  void set(const std::string& key, const std::string& value) { entries_[key] = {value, "--" + key}; }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    used_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    double out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
      fail(ErrorKind::Validation, it->second.origin + ": '" + key + "' expects a number, got '" + v + "'");
    return out;
  }

  long get_int(const std::string& key, long fallback) const {
    used_.insert(key);
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second.value;
    long out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty())
      fail(ErrorKind::Validation, it->second.origin + ": '" + key + "' expects an integer, got '" + v + "'");
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const std::string v = get_string(key, fallback ? "true" : "false");
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(ErrorKind::Validation, origin(key) + ": '" + key + "' expects true/false, got '" + v + "'");
  }

  /// A path value; relative paths from the file resolve against its directory.
  std::string get_path(const std::string& key, const std::string& fallback) const {
    const std::string v = get_string(key, fallback);
    const auto it = entries_.find(key);
    if (v.empty() || it == entries_.end() || it->second.origin.rfind("--", 0) == 0) return v;
    const std::filesystem::path p(v);
    return p.is_absolute() || dir_.empty() ? v : (std::filesystem::path(dir_) / p).string();
  }

  std::string origin(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? std::string("default") : it->second.origin;
  }

  /// Distinct indices N appearing in keys "prefix.N.*", ascending.
  std::vector<int> indices(const std::string& prefix) const {
    std::set<int> out;
    const std::string p = prefix + ".";
    for (const auto& [k, e] : entries_) {
      if (k.rfind(p, 0) != 0) continue;
      const auto rest = k.substr(p.size());
      const auto dot = rest.find('.');
      if (dot == std::string::npos) continue;  // scalar key such as mixture.eps_weight
      int idx = 0;
      const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + dot, idx);
      if (ec != std::errc() || ptr != rest.data() + dot)
        fail(ErrorKind::Validation, e.origin + ": expected '" + p + "<n>.<field>', got '" + k + "'");
      out.insert(idx);
    }
    return {out.begin(), out.end()};
  }

  /// Fails on the first key that no reader asked for (usually a typo).
  void reject_unused() const {
    for (const auto& [k, e] : entries_)
      if (!used_.count(k)) fail(ErrorKind::Validation, e.origin + ": unknown key '" + k + "'");
  }

 private:
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
  std::string dir_;
};

}  // namespace bayesop::config
