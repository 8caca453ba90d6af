#include "sdekit/taming.hpp"

#include <cmath>

namespace sdekit::taming {

void validate(const TamingParams& p) {
  if (!(p.delta >= 2.0) || !std::isfinite(p.delta))
    fail(ErrorCode::InvalidArgument, "taming: delta must satisfy delta >= 2");
}

void psi(std::span<const double> x, double delta, std::span<double> out) {
  double n = norm2(x);
  double p = std::pow(n, delta);
  if (!std::isfinite(p)) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.0;
    return;
  }
  double den = 1.0 + p;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / den;
}

/* Both derivatives are evaluated with |z| factored out of the textbook
 * expansion: with r = |z|^delta / (1+|z|^delta) and s = r / |z| every
 * coefficient below is a product of quantities in [0, 1), so very small and
 * very large |z| cannot overflow. */

void psi1_apply(std::span<const double> z, std::span<const double> u,
                double delta, std::span<double> out) {
  double n = norm2(z);
  if (n == 0.0) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = u[i];
    return;
  }
  double p = std::pow(n, delta);
  if (!std::isfinite(p)) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = 0.0;
    return;
  }
  double den = 1.0 + p;
  double r = p / den;
  double zu = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) zu += (z[i] / n) * u[i];
  double c = delta * r * zu / den;
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = u[i] / den - c * (z[i] / n);
}

void psi2_apply(std::span<const double> z, std::span<const double> u,
                double delta, std::span<double> out) {
  double n = norm2(z);
  if (n == 0.0) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = 0.0;
    return;
  }
  double p = std::pow(n, delta);
  if (!std::isfinite(p)) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = 0.0;
    return;
  }
  double den = 1.0 + p;
  double r = p / den;       /* |z|^delta / (1+|z|^delta) */
  double s = r / n;         /* |z|^(delta-1) / (1+|z|^delta) */
  double zu = 0.0, uu = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    zu += (z[i] / n) * u[i];
    uu += u[i] * u[i];
  }
  double c1 = 2.0 * delta * delta * r * s * zu * zu / den;
  double c2 = delta * s / den;
  double c3 = delta * (delta - 2.0) * s * zu * zu / den;
  for (std::size_t i = 0; i < z.size(); ++i) {
    double zh = z[i] / n;
    out[i] = c1 * zh - c2 * (2.0 * u[i] * zu + zh * uu) - c3 * zh;
  }
}

Vec psi(std::span<const double> x, double delta) {
  Vec out(x.size());
  psi(x, delta, out);
  return out;
}

Vec psi1_apply(std::span<const double> z, std::span<const double> u,
               double delta) {
  Vec out(z.size());
  psi1_apply(z, u, delta, out);
  return out;
}

Vec psi2_apply(std::span<const double> z, std::span<const double> u,
               double delta) {
  Vec out(z.size());
  psi2_apply(z, u, delta, out);
  return out;
}

}  // namespace sdekit::taming
