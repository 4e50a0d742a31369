#pragma once

#include <string>
#include <vector>

#include "armbench/types.hpp"

namespace arm {

/// Flat key/value text file: one `key = value` per line, `#` comments,
/// values are whitespace-separated numbers or free-form strings.
/// Keys may carry index/field suffixes, e.g. `axes[2].omega`.
/// Insertion order is preserved so write(parse(f)) round-trips.
class KvFile {
 public:
  KvFile() = default;

  static KvFile parse_file(const std::string& path);
  static KvFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_scalar(const std::string& key) const;
  VecX get_vector(const std::string& key) const;

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_scalar_or(const std::string& key, double fallback) const;
  VecX get_vector_or(const std::string& key, const VecX& fallback) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, const VecX& value);

  /// Keys in insertion order.
  const std::vector<std::string>& keys() const { return order_; }
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  std::string to_string() const;
  void write_file(const std::string& path) const;

 private:
  struct Entry {
    std::string key;
    std::string value;
  };
  Entry* find(const std::string& key);
  const Entry* find(const std::string& key) const;

  std::vector<Entry> entries_;
  std::vector<std::string> order_;
};

/// Full-precision decimal formatting (round-trips doubles exactly).
std::string format_double(double value);

}  // namespace arm
