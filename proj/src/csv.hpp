#pragma once

#include <charconv>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>

namespace geoqm::csv {

/// Shortest round-trip decimal form, '.' separator, locale independent.
inline std::string format(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_row(std::ostream& os, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    os << format(values[i]);
  }
  os << '\n';
}

inline void write_row(std::ostream& os, std::initializer_list<double> values) {
  write_row(os, std::span<const double>(values.begin(), values.size()));
}

}  // namespace geoqm::csv
