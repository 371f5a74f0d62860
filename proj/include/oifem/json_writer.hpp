#pragma once

// Minimal ordered JSON object writer with fixed 17-significant-digit numbers,
// so output files are byte-stable across runs.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <type_traits>
#include <string>
#include <vector>

namespace oifem {

inline std::string format17(double x) {
  if (!std::isfinite(x))
    return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class JsonObjectWriter {
public:
  explicit JsonObjectWriter(std::ostream &os) : os_(os) { os_ << "{"; }
  JsonObjectWriter(const JsonObjectWriter &) = delete;
  JsonObjectWriter &operator=(const JsonObjectWriter &) = delete;

  JsonObjectWriter &number(const std::string &key, double v) {
    emit_key(key);
    os_ << format17(v);
    return *this;
  }

  JsonObjectWriter &integer(const std::string &key, long long v) {
    emit_key(key);
    os_ << v;
    return *this;
  }

  JsonObjectWriter &boolean(const std::string &key, bool v) {
    emit_key(key);
    os_ << (v ? "true" : "false");
    return *this;
  }

  JsonObjectWriter &string(const std::string &key, const std::string &v) {
    emit_key(key);
    os_ << '"' << escape(v) << '"';
    return *this;
  }

  template <class T>
  JsonObjectWriter &array(const std::string &key, const std::vector<T> &values) {
    emit_key(key);
    os_ << '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i)
        os_ << ", ";
      if constexpr (std::is_floating_point_v<T>)
        os_ << format17(values[i]);
      else
        os_ << values[i];
    }
    os_ << ']';
    return *this;
  }

  void close() {
    if (!closed_) {
      os_ << (first_ ? "}\n" : "\n}\n");
      closed_ = true;
    }
  }

  ~JsonObjectWriter() { close(); }

private:
  static std::string escape(const std::string &s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\')
        out += '\\';
      out += c;
    }
    return out;
  }

  void emit_key(const std::string &key) {
    os_ << (first_ ? "\n  \"" : ",\n  \"") << escape(key) << "\": ";
    first_ = false;
  }

  std::ostream &os_;
  bool first_ = true;
  bool closed_ = false;
};

} // namespace oifem
