#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>

#include "sdekit/common.hpp"

namespace sdekit::models {

enum class Domain { RealSpace, PositiveOrthant };

struct LvCoefficients {
  int d = 0;
  int m = 0;
  Vec b;      /* d growth rates, sign free */
  Vec A;      /* d x d interaction matrix, row-major */
  Vec sigma;  /* d x m noise loadings, row-major */
};

/* Requires every A entry >= 0 and every diagonal entry > 0. */
void validate(const LvCoefficients& c);

using VecFn = std::function<void(std::span<const double>, std::span<double>)>;
using ScalarFn = std::function<double(std::span<const double>)>;
/* phi(x1) fills one 1 x m diffusion row. */
using PhiFn = std::function<void(double, std::span<double>)>;
/* componentwise potential data */
using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
using PotFn = std::function<double(std::span<const double>)>;

/*
 * A d-dimensional Ito SDE dX = f(X) dt + g(X) dW with m driving components,
 * bundled with the Lyapunov data (U0, U1, alpha, c) used by the
 * exponential-integrability diagnostic:
 *   (A U0)(x) + |g(x)* grad U0(x)|^2 / 2 + U1(x) <= c + alpha U0(x).
 * alpha and c are recorded model constants, not fitted quantities.
 */
struct SdeModel {
  std::string name;
  int dim = 0;
  int noise_dim = 0;
  Domain domain = Domain::RealSpace;
  Vec x0;
  VecFn drift;          /* f: R^d -> R^d */
  VecFn diffusion;      /* g: R^d -> R^{d x m}, row-major */
  VecFn drift_jacobian; /* optional, R^d -> R^{d x d} row-major */
  ScalarFn lyapunov_u0; /* optional */
  ScalarFn lyapunov_u1; /* optional, null means identically 0 */
  VecFn u0_grad;        /* optional analytic gradient of U0 */
  VecFn u0_hess;        /* optional analytic Hessian of U0, d x d */
  double alpha = 0.0;
  double lyapunov_c = 0.0;
  LvCoefficients lv;    /* populated iff name == "lotka_volterra" */
  /* Unnormalized log of the stationary joint density of (x1, x2); set only
   * for planar models with a known closed form (Langevin with m = 1, and
   * the additive van der Pol oscillator at beta = 1, gamma = alpha). */
  std::function<double(double, double)> stationary_log_joint;
};

/* f = (a1 (x2-x1), a2 x1 - x2 - x1 x3, x1 x2 - a3 x3), constant 3 x 3 noise.
 * U0 = |x|^2, U1 = 0. */
SdeModel lorenz_additive(double a1, double a2, double a3, const Vec& noise,
                         const Vec& x0);

/* Second-order dynamics x = (q, p) with q, p in R^m:
 * f = (p, -grad_V(q) - gamma p), g u = (0, sqrt(beta) u).
 * U0 = (v/2)|x|^2 + v V(q) with v = min(1, gamma/beta), U1 = 0. */
SdeModel langevin(GradFn grad_V, PotFn V, double gamma, double beta,
                  const Vec& x0, VecFn hess_V = nullptr);

/* f = -grad_V, g = sqrt(beta) I. U0 = v V with v = 1/beta,
 * U1 = v (1 - beta v / 2) |grad_V|^2. */
SdeModel brownian_dynamics(GradFn grad_V, PotFn V, double beta, const Vec& x0,
                           VecFn hess_V = nullptr);

/* f = (x2, (gamma - alpha x1^2) x2 - beta x1), g u = (0, phi(x1) u).
 * U0 = (v/2)|x|^2 with v = alpha/4, U1 = v (alpha - 2v) (x1 x2)^2. */
SdeModel van_der_pol(double gamma, double alpha, double beta, PhiFn phi,
                     int noise_dim, const Vec& x0);

/* Additive-noise variant with phi(x1) = theta in every noise column; when
 * beta = 1 and gamma = alpha it also carries the stationary joint density
 * log p = -alpha/(8 theta^2) ((x1^2+x2^2)^2 - 8 (x1^2+x2^2)). */
SdeModel van_der_pol_additive(double gamma, double alpha, double beta,
                              double theta, int noise_dim, const Vec& x0);

/* f = (x2, a2 x2 - a1 x1 - a3 x1^2 x2 - x1^3), g u = (0, phi(x1) u).
 * U0 = (v/2)(x1^4/2 + x2^2) with v = a3/2, U1 = v (a3 - v) (x1 x2)^2. */
SdeModel duffing_van_der_pol(double a1, double a2, double a3, PhiFn phi,
                             int noise_dim, const Vec& x0);

/* dX = diag(X)(b - A X) dt + diag(X) sigma dW on the positive orthant.
 * U0 = v (1+|x|^2)^{1/2},
 * U1 = v (1+|x|^2)^{-1/2} (amin/sqrt(d) - v m sbar^2/2) |x|^3 + U0,
 * with sbar = max |sigma_ij|, amin = min A_ii,
 * v = min(1, 2 amin / (sqrt(d) m sbar^2)) / 2,
 * alpha = max|b_i| + m sbar^2 + 1, c = 0. */
SdeModel lotka_volterra(const LvCoefficients& coeffs, const Vec& x0);

/* Scalar geometric Brownian motion, used as a calibration model. */
SdeModel gbm(double mu, double sigma, double x0);

struct CommutativityReport {
  bool commutative = false;
  double worst = 0.0;
  Vec where;
};

/* Finite-difference check of
 *   sum_k1 (d g^(k2 j2) / d x_k1) g^(k1 j1) = 0  for all k2, j1, j2
 * at `samples` points near x0 (projected into the domain). */
CommutativityReport check_commutativity(const SdeModel& model, int samples,
                                        double tol,
                                        std::uint64_t seed = 2024);

/* (A U0)(x) + |g* grad U0|^2/2 + U1 - c - alpha U0; requires the analytic
 * U0 gradient and Hessian. Nonpositive (up to roundoff) where the Lyapunov
 * drift condition holds. */
double lyapunov_drift_residual(const SdeModel& model,
                               std::span<const double> x);

}  // namespace sdekit::models
