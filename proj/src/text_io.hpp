#pragma once

// Whitespace-token helpers shared by the plain-text file formats.

#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ibq::detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& os, std::span<const double> row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ' ';
    os << format_double(row[i]);
  }
  os << '\n';
}

/// Token stream over a text file; lines whose first non-blank character is
/// '#' are skipped.
class TokenReader {
 public:
  explicit TokenReader(std::istream& is) : is_(is) {}

  std::string next() {
    std::string tok;
    while (!(line_ >> tok)) {
      std::string line;
      if (!std::getline(is_, line)) throw std::runtime_error("unexpected end of input");
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] == '#') continue;
      line_.clear();
      line_.str(line);
    }
    return tok;
  }

  bool at_end() {
    std::string tok;
    const auto pos = line_.tellg();
    if (line_ >> tok) {
      line_.clear();
      line_.seekg(pos);
      return false;
    }
    for (;;) {
      std::string line;
      if (!std::getline(is_, line)) return true;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      line_.clear();
      line_.str(line);
      return false;
    }
  }

  void expect(const std::string& keyword) {
    const auto tok = next();
    if (tok != keyword) throw std::runtime_error("expected '" + keyword + "', found '" + tok + "'");
  }

  double next_double() {
    const auto tok = next();
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::runtime_error("malformed number '" + tok + "'");
    return v;
  }

  long long next_int() {
    const auto tok = next();
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::runtime_error("malformed integer '" + tok + "'");
    return v;
  }

  std::size_t next_size() {
    const auto v = next_int();
    if (v < 0) throw std::runtime_error("negative size in input");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> next_doubles(std::size_t count) {
    std::vector<double> out(count);
    for (auto& v : out) v = next_double();
    return out;
  }

 private:
  std::istream& is_;
  std::istringstream line_;
};

}  // namespace ibq::detail
