#include "armbench/kv_file.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace arm {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0;
  size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

KvFile KvFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

KvFile KvFile::parse_string(const std::string& text, const std::string& origin) {
  KvFile kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected `key = value`, got: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv.set(key, value);
  }
  return kv;
}

KvFile::Entry* KvFile::find(const std::string& key) {
  for (auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

const KvFile::Entry* KvFile::find(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

bool KvFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string KvFile::get_string(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) throw ParseError("missing key: " + key);
  return e->value;
}

double KvFile::get_scalar(const std::string& key) const {
  const std::string raw = get_string(key);
  double out;
  if (!parse_double(raw, out)) throw ParseError("key " + key + ": not a number: " + raw);
  return out;
}

VecX KvFile::get_vector(const std::string& key) const {
  const std::string raw = get_string(key);
  std::istringstream ss(raw);
  std::vector<double> values;
  std::string token;
  while (ss >> token) {
    double v;
    if (!parse_double(token, v)) throw ParseError("key " + key + ": not a number: " + token);
    values.push_back(v);
  }
  if (values.empty()) throw ParseError("key " + key + ": empty vector");
  return Eigen::Map<const VecX>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string KvFile::get_string_or(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? e->value : fallback;
}

double KvFile::get_scalar_or(const std::string& key, double fallback) const {
  return has(key) ? get_scalar(key) : fallback;
}

VecX KvFile::get_vector_or(const std::string& key, const VecX& fallback) const {
  return has(key) ? get_vector(key) : fallback;
}

void KvFile::set(const std::string& key, const std::string& value) {
  if (Entry* e = find(key)) {
    e->value = value;
    return;
  }
  entries_.push_back({key, value});
  order_.push_back(key);
}

void KvFile::set(const std::string& key, double value) { set(key, format_double(value)); }

void KvFile::set(const std::string& key, const VecX& value) {
  std::string joined;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (i > 0) joined += ' ';
    joined += format_double(value[i]);
  }
  set(key, joined);
}

std::vector<std::string> KvFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& key : order_) {
    if (key.rfind(prefix, 0) == 0) out.push_back(key);
  }
  return out;
}

std::string KvFile::to_string() const {
  std::string out;
  for (const auto& e : entries_) {
    out += e.key;
    out += " = ";
    out += e.value;
    out += '\n';
  }
  return out;
}

void KvFile::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << to_string();
}

}  // namespace arm
