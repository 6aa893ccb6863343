#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

#include "lend/errors.hpp"

namespace lend {

// Shortest decimal form that round-trips a double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& token, const char* context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error(ErrCode::row_length_mismatch,
                std::string(context) + ": bad numeric token '" + token + "'");
  }
  return v;
}

inline long parse_long(const std::string& token, const char* context) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw Error(ErrCode::row_length_mismatch,
                std::string(context) + ": bad integer token '" + token + "'");
  }
  return v;
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace lend
