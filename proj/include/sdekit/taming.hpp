#pragma once

#include <span>

#include "sdekit/common.hpp"

namespace sdekit::taming {

struct TamingParams {
  double delta = 3.0;
};

void validate(const TamingParams& p);

/* psi(x) = x / (1 + |x|^delta). */
void psi(std::span<const double> x, double delta, std::span<double> out);

/* First derivative of psi at z applied to u:
 *   psi1(z) u = u / (1+|z|^d) - d z |z|^{d-2} <z,u> / (1+|z|^d)^2
 * with psi1(0) u = u. */
void psi1_apply(std::span<const double> z, std::span<const double> u,
                double delta, std::span<double> out);

/* Second derivative of psi at z evaluated on the diagonal (u, u):
 *   psi2(z)(u,u) = 2 d^2 |z|^{2(d-2)} z <z,u>^2 / (1+|z|^d)^3
 *                - d |z|^{d-2} (2 u <z,u> + z |u|^2) / (1+|z|^d)^2
 *                - d (d-2) |z|^{d-4} z <z,u>^2 / (1+|z|^d)^2
 * with psi2(0)(u,u) = 0. Evaluated with |z| factored out so that tiny and
 * huge |z| stay finite. */
void psi2_apply(std::span<const double> z, std::span<const double> u,
                double delta, std::span<double> out);

Vec psi(std::span<const double> x, double delta);
Vec psi1_apply(std::span<const double> z, std::span<const double> u,
               double delta);
Vec psi2_apply(std::span<const double> z, std::span<const double> u,
               double delta);

}  // namespace sdekit::taming
