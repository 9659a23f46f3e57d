#pragma once

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace abconv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline double env_double(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || !(v > 0.0)) return fallback;
  return v;
}

}  // namespace detail

// Global absolute tolerance (membership tests, slack in inequality checks).
// ABCONV_TOL overrides the default of 1e-9.
inline double tolerance() {
  static const double tol = detail::env_double("ABCONV_TOL", 1e-9);
  return tol;
}

// Upper bound on worker threads used by grid sweeps. ABCONV_THREADS caps it.
inline unsigned thread_limit() {
  static const unsigned n = [] {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const double requested = detail::env_double("ABCONV_THREADS", static_cast<double>(hw));
    return std::max(1u, static_cast<unsigned>(requested));
  }();
  return n;
}

}  // namespace abconv
