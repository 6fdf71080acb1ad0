#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

namespace netregime {

/// Round-trip formatting: 17 significant digits, "NA" for missing values.
inline std::string csv_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_double(const std::optional<double>& v) {
  return v ? csv_double(*v) : std::string("NA");
}

}  // namespace netregime
