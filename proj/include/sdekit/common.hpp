#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdekit {

inline constexpr const char* kVersion = "0.1.0";

using Vec = std::vector<double>;

enum class ErrorCode {
  InvalidArgument,
  Config,
  Divergence,
  Io,
  Unsupported,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  return std::sqrt(dot(a, a));
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

/* y = A x for row-major A of shape rows x cols. */
inline void matvec(std::span<const double> a, int rows, int cols,
                   std::span<const double> x, std::span<double> y) {
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = a.data() + static_cast<std::size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

inline double frobenius_norm(std::span<const double> a) {
  return norm2(a);
}

}  // namespace sdekit
