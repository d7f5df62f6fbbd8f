#pragma once

#include <chrono>
#include <cstdio>
#include <string>

namespace acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Criteria evaluated against the 64-bit build (criteria_f64.cpp).
Outcome gradient_suite();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace acceptance
