#include "sdekit/models.hpp"

#include <algorithm>
#include <cmath>

#include "sdekit/brownian.hpp"

namespace sdekit::models {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

void validate(const LvCoefficients& c) {
  require(c.d >= 1 && c.m >= 1, "lotka_volterra: need d >= 1 and m >= 1");
  require(static_cast<int>(c.b.size()) == c.d, "lotka_volterra: b must have d entries");
  require(static_cast<int>(c.A.size()) == c.d * c.d,
          "lotka_volterra: A must be d x d");
  require(static_cast<int>(c.sigma.size()) == c.d * c.m,
          "lotka_volterra: sigma must be d x m");
  for (int i = 0; i < c.d; ++i)
    for (int j = 0; j < c.d; ++j)
      if (!(c.A[i * c.d + j] >= 0.0))
        fail(ErrorCode::InvalidArgument,
             "lotka_volterra: A(" + std::to_string(i) + "," +
                 std::to_string(j) + ") is negative");
  for (int i = 0; i < c.d; ++i)
    if (!(c.A[i * c.d + i] > 0.0))
      fail(ErrorCode::InvalidArgument,
           "lotka_volterra: diagonal entry A(" + std::to_string(i) + "," +
               std::to_string(i) + ") must be positive");
}

SdeModel lorenz_additive(double a1, double a2, double a3, const Vec& noise,
                         const Vec& x0) {
  require(a1 >= 0.0 && a2 >= 0.0 && a3 >= 0.0,
          "lorenz: coefficients must be nonnegative");
  require(noise.size() == 9, "lorenz: noise must be a 3 x 3 matrix");
  require(x0.size() == 3, "lorenz: x0 must have 3 entries");
  SdeModel mdl;
  mdl.name = "lorenz";
  mdl.dim = 3;
  mdl.noise_dim = 3;
  mdl.x0 = x0;
  mdl.drift = [a1, a2, a3](std::span<const double> x, std::span<double> out) {
    out[0] = a1 * (x[1] - x[0]);
    out[1] = a2 * x[0] - x[1] - x[0] * x[2];
    out[2] = x[0] * x[1] - a3 * x[2];
  };
  mdl.diffusion = [noise](std::span<const double>, std::span<double> out) {
    std::copy(noise.begin(), noise.end(), out.begin());
  };
  mdl.drift_jacobian = [a1, a2, a3](std::span<const double> x,
                                    std::span<double> out) {
    out[0] = -a1;         out[1] = a1;   out[2] = 0.0;
    out[3] = a2 - x[2];   out[4] = -1.0; out[5] = -x[0];
    out[6] = x[1];        out[7] = x[0]; out[8] = -a3;
  };
  mdl.lyapunov_u0 = [](std::span<const double> x) { return dot(x, x); };
  mdl.u0_grad = [](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < 3; ++i) out[i] = 2.0 * x[i];
  };
  mdl.u0_hess = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = out[4] = out[8] = 2.0;
  };
  double gf2 = dot(noise, noise);
  mdl.alpha = 2.0 * (a1 + a2) + 2.0 * gf2;
  mdl.lyapunov_c = gf2;
  return mdl;
}

SdeModel langevin(GradFn grad_V, PotFn V, double gamma, double beta,
                  const Vec& x0, VecFn hess_V) {
  require(gamma > 0.0 && beta > 0.0, "langevin: gamma and beta must be positive");
  require(x0.size() >= 2 && x0.size() % 2 == 0,
          "langevin: x0 must have even length 2m");
  int m = static_cast<int>(x0.size()) / 2;
  double sb = std::sqrt(beta);
  double v = std::min(1.0, gamma / beta);
  SdeModel mdl;
  mdl.name = "langevin";
  mdl.dim = 2 * m;
  mdl.noise_dim = m;
  mdl.x0 = x0;
  mdl.drift = [grad_V, gamma, m](std::span<const double> x,
                                 std::span<double> out) {
    Vec gv(m);
    grad_V(x.subspan(0, m), gv);
    for (int i = 0; i < m; ++i) {
      out[i] = x[m + i];
      out[m + i] = -gv[i] - gamma * x[m + i];
    }
  };
  mdl.diffusion = [sb, m](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < m; ++i) out[(m + i) * m + i] = sb;
  };
  if (hess_V) {
    mdl.drift_jacobian = [hess_V, gamma, m](std::span<const double> x,
                                            std::span<double> out) {
      int d = 2 * m;
      std::fill(out.begin(), out.end(), 0.0);
      Vec hv(static_cast<std::size_t>(m) * m);
      hess_V(x.subspan(0, m), hv);
      for (int i = 0; i < m; ++i) {
        out[i * d + m + i] = 1.0;
        for (int j = 0; j < m; ++j) out[(m + i) * d + j] = -hv[i * m + j];
        out[(m + i) * d + m + i] = -gamma;
      }
    };
  }
  mdl.lyapunov_u0 = [V, v, m](std::span<const double> x) {
    return 0.5 * v * dot(x, x) + v * V(x.subspan(0, m));
  };
  mdl.u0_grad = [grad_V, v, m](std::span<const double> x,
                               std::span<double> out) {
    Vec gv(m);
    grad_V(x.subspan(0, m), gv);
    for (int i = 0; i < 2 * m; ++i) out[i] = v * x[i];
    for (int i = 0; i < m; ++i) out[i] += v * gv[i];
  };
  if (hess_V) {
    mdl.u0_hess = [hess_V, v, m](std::span<const double> x,
                                 std::span<double> out) {
      int d = 2 * m;
      std::fill(out.begin(), out.end(), 0.0);
      Vec hv(static_cast<std::size_t>(m) * m);
      hess_V(x.subspan(0, m), hv);
      for (int i = 0; i < d; ++i) out[i * d + i] = v;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) out[i * d + j] += v * hv[i * m + j];
    };
  }
  mdl.alpha = 1.0;
  mdl.lyapunov_c = 0.5 * v * beta * m;
  if (m == 1) {
    double c = 2.0 * gamma / beta;
    mdl.stationary_log_joint = [V, c](double x1, double x2) {
      double q[1] = {x1};
      return -c * (V(std::span<const double>(q, 1)) + 0.5 * x2 * x2);
    };
  }
  return mdl;
}

SdeModel brownian_dynamics(GradFn grad_V, PotFn V, double beta, const Vec& x0,
                           VecFn hess_V) {
  require(beta > 0.0, "brownian_dynamics: beta must be positive");
  require(!x0.empty(), "brownian_dynamics: x0 must be nonempty");
  int m = static_cast<int>(x0.size());
  double sb = std::sqrt(beta);
  double v = 1.0 / beta;
  SdeModel mdl;
  mdl.name = "brownian_dynamics";
  mdl.dim = m;
  mdl.noise_dim = m;
  mdl.x0 = x0;
  mdl.drift = [grad_V, m](std::span<const double> x, std::span<double> out) {
    Vec gv(m);
    grad_V(x, gv);
    for (int i = 0; i < m; ++i) out[i] = -gv[i];
  };
  mdl.diffusion = [sb, m](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < m; ++i) out[i * m + i] = sb;
  };
  if (hess_V) {
    mdl.drift_jacobian = [hess_V, m](std::span<const double> x,
                                     std::span<double> out) {
      hess_V(x, out);
      for (int i = 0; i < m * m; ++i) out[i] = -out[i];
    };
  }
  mdl.lyapunov_u0 = [V, v](std::span<const double> x) { return v * V(x); };
  mdl.lyapunov_u1 = [grad_V, v, beta, m](std::span<const double> x) {
    Vec gv(m);
    grad_V(x, gv);
    return v * (1.0 - 0.5 * beta * v) * dot(gv, gv);
  };
  mdl.u0_grad = [grad_V, v, m](std::span<const double> x,
                               std::span<double> out) {
    grad_V(x, out);
    for (int i = 0; i < m; ++i) out[i] *= v;
  };
  if (hess_V) {
    mdl.u0_hess = [hess_V, v, m](std::span<const double> x,
                                 std::span<double> out) {
      hess_V(x, out);
      for (int i = 0; i < m * m; ++i) out[i] *= v;
    };
  }
  mdl.alpha = beta;
  mdl.lyapunov_c = beta;
  return mdl;
}

namespace {

SdeModel planar_oscillator(std::string name, VecFn drift, VecFn jacobian,
                           PhiFn phi, int noise_dim, const Vec& x0, double v,
                           double u1_coeff) {
  require(noise_dim >= 1, name + ": noise_dim must be >= 1");
  require(x0.size() == 2, name + ": x0 must have 2 entries");
  SdeModel mdl;
  mdl.name = std::move(name);
  mdl.dim = 2;
  mdl.noise_dim = noise_dim;
  mdl.x0 = x0;
  mdl.drift = std::move(drift);
  mdl.drift_jacobian = std::move(jacobian);
  mdl.diffusion = [phi, noise_dim](std::span<const double> x,
                                   std::span<double> out) {
    for (int j = 0; j < noise_dim; ++j) out[j] = 0.0;
    phi(x[0], out.subspan(noise_dim, noise_dim));
  };
  mdl.lyapunov_u1 = [v, u1_coeff](std::span<const double> x) {
    double w = x[0] * x[1];
    return v * u1_coeff * w * w;
  };
  Vec phi0(noise_dim);
  phi(0.0, phi0);
  mdl.lyapunov_c = v * dot(phi0, phi0);
  return mdl;
}

}  // namespace

SdeModel van_der_pol(double gamma, double alpha, double beta, PhiFn phi,
                     int noise_dim, const Vec& x0) {
  require(gamma > 0.0 && alpha > 0.0 && beta > 0.0,
          "van_der_pol: gamma, alpha, beta must be positive");
  double v = alpha / 4.0;
  SdeModel mdl = planar_oscillator(
      "van_der_pol",
      [gamma, alpha, beta](std::span<const double> x, std::span<double> out) {
        out[0] = x[1];
        out[1] = (gamma - alpha * x[0] * x[0]) * x[1] - beta * x[0];
      },
      [gamma, alpha, beta](std::span<const double> x, std::span<double> out) {
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = -2.0 * alpha * x[0] * x[1] - beta;
        out[3] = gamma - alpha * x[0] * x[0];
      },
      std::move(phi), noise_dim, x0, v, alpha - 2.0 * v);
  mdl.lyapunov_u0 = [v](std::span<const double> x) {
    return 0.5 * v * dot(x, x);
  };
  mdl.u0_grad = [v](std::span<const double> x, std::span<double> out) {
    out[0] = v * x[0];
    out[1] = v * x[1];
  };
  mdl.u0_hess = [v](std::span<const double>, std::span<double> out) {
    out[0] = v; out[1] = 0.0;
    out[2] = 0.0; out[3] = v;
  };
  mdl.alpha = std::fabs(1.0 - beta) + 2.0 * gamma + 2.0;
  return mdl;
}

SdeModel van_der_pol_additive(double gamma, double alpha, double beta,
                              double theta, int noise_dim, const Vec& x0) {
  require(theta > 0.0, "van_der_pol: theta must be positive");
  SdeModel mdl = van_der_pol(
      gamma, alpha, beta,
      [theta](double, std::span<double> row) {
        std::fill(row.begin(), row.end(), theta);
      },
      noise_dim, x0);
  if (beta == 1.0 && gamma == alpha) {
    double c = alpha / (8.0 * theta * theta * noise_dim);
    mdl.stationary_log_joint = [c](double x1, double x2) {
      double r2 = x1 * x1 + x2 * x2;
      return -c * (r2 * r2 - 8.0 * r2);
    };
  }
  return mdl;
}

SdeModel duffing_van_der_pol(double a1, double a2, double a3, PhiFn phi,
                             int noise_dim, const Vec& x0) {
  require(a3 > 0.0, "duffing_van_der_pol: a3 must be positive");
  double v = a3 / 2.0;
  SdeModel mdl = planar_oscillator(
      "duffing_vdp",
      [a1, a2, a3](std::span<const double> x, std::span<double> out) {
        out[0] = x[1];
        out[1] = a2 * x[1] - a1 * x[0] - a3 * x[0] * x[0] * x[1] -
                 x[0] * x[0] * x[0];
      },
      [a1, a2, a3](std::span<const double> x, std::span<double> out) {
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = -a1 - 2.0 * a3 * x[0] * x[1] - 3.0 * x[0] * x[0];
        out[3] = a2 - a3 * x[0] * x[0];
      },
      std::move(phi), noise_dim, x0, v, a3 - v);
  mdl.lyapunov_u0 = [v](std::span<const double> x) {
    return 0.5 * v * (0.5 * x[0] * x[0] * x[0] * x[0] + x[1] * x[1]);
  };
  mdl.u0_grad = [v](std::span<const double> x, std::span<double> out) {
    out[0] = v * x[0] * x[0] * x[0];
    out[1] = v * x[1];
  };
  mdl.u0_hess = [v](std::span<const double> x, std::span<double> out) {
    out[0] = 3.0 * v * x[0] * x[0]; out[1] = 0.0;
    out[2] = 0.0; out[3] = v;
  };
  mdl.alpha = std::fabs(a1) + 2.0 * std::fabs(a2) + 2.0;
  return mdl;
}

SdeModel lotka_volterra(const LvCoefficients& coeffs, const Vec& x0) {
  validate(coeffs);
  require(static_cast<int>(x0.size()) == coeffs.d,
          "lotka_volterra: x0 must have d entries");
  for (double x : x0)
    require(x > 0.0, "lotka_volterra: x0 must be strictly positive");
  int d = coeffs.d, m = coeffs.m;
  double sbar = max_abs(coeffs.sigma);
  double amin = coeffs.A[0];
  for (int i = 1; i < d; ++i) amin = std::min(amin, coeffs.A[i * d + i]);
  double v = sbar > 0.0
                 ? 0.5 * std::min(1.0, 2.0 * amin / (std::sqrt(double(d)) * m *
                                                     sbar * sbar))
                 : 0.5;
  double drift_gain = amin / std::sqrt(double(d)) - 0.5 * v * m * sbar * sbar;
  SdeModel mdl;
  mdl.name = "lotka_volterra";
  mdl.dim = d;
  mdl.noise_dim = m;
  mdl.domain = Domain::PositiveOrthant;
  mdl.x0 = x0;
  mdl.lv = coeffs;
  mdl.drift = [coeffs, d](std::span<const double> x, std::span<double> out) {
    for (int i = 0; i < d; ++i) {
      double s = coeffs.b[i];
      for (int j = 0; j < d; ++j) s -= coeffs.A[i * d + j] * x[j];
      out[i] = x[i] * s;
    }
  };
  mdl.diffusion = [coeffs, d, m](std::span<const double> x,
                                 std::span<double> out) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < m; ++j) out[i * m + j] = x[i] * coeffs.sigma[i * m + j];
  };
  mdl.drift_jacobian = [coeffs, d](std::span<const double> x,
                                   std::span<double> out) {
    for (int i = 0; i < d; ++i) {
      double s = coeffs.b[i];
      for (int k = 0; k < d; ++k) s -= coeffs.A[i * d + k] * x[k];
      for (int j = 0; j < d; ++j) {
        out[i * d + j] = -x[i] * coeffs.A[i * d + j];
        if (i == j) out[i * d + j] += s;
      }
    }
  };
  mdl.lyapunov_u0 = [v](std::span<const double> x) {
    return v * std::sqrt(1.0 + dot(x, x));
  };
  mdl.lyapunov_u1 = [v, drift_gain](std::span<const double> x) {
    double s = std::sqrt(1.0 + dot(x, x));
    double n = norm2(x);
    return v * drift_gain * n * n * n / s + v * s;
  };
  mdl.u0_grad = [v](std::span<const double> x, std::span<double> out) {
    double s = std::sqrt(1.0 + dot(x, x));
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = v * x[i] / s;
  };
  mdl.u0_hess = [v, d](std::span<const double> x, std::span<double> out) {
    double s = std::sqrt(1.0 + dot(x, x));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        out[i * d + j] = -v * x[i] * x[j] / (s * s * s);
        if (i == j) out[i * d + j] += v / s;
      }
  };
  mdl.alpha = max_abs(coeffs.b) + m * sbar * sbar + 1.0;
  mdl.lyapunov_c = 0.0;
  return mdl;
}

SdeModel gbm(double mu, double sigma, double x0) {
  SdeModel mdl;
  mdl.name = "gbm";
  mdl.dim = 1;
  mdl.noise_dim = 1;
  mdl.x0 = {x0};
  mdl.drift = [mu](std::span<const double> x, std::span<double> out) {
    out[0] = mu * x[0];
  };
  mdl.diffusion = [sigma](std::span<const double> x, std::span<double> out) {
    out[0] = sigma * x[0];
  };
  mdl.drift_jacobian = [mu](std::span<const double>, std::span<double> out) {
    out[0] = mu;
  };
  return mdl;
}

CommutativityReport check_commutativity(const SdeModel& model, int samples,
                                        double tol, std::uint64_t seed) {
  int d = model.dim, m = model.noise_dim;
  CommutativityReport rep;
  rep.worst = 0.0;
  Vec x(d), gp(static_cast<std::size_t>(d) * m), gm(gp.size()), g0(gp.size());
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i)
      x[i] = model.x0[i] + brownian::standard_normal(seed, s, 0, i);
    if (model.domain == Domain::PositiveOrthant)
      for (int i = 0; i < d; ++i) x[i] = std::fabs(x[i]) + 0.1;
    model.diffusion(x, g0);
    /* contraction[k2][j2][j1] accumulated over k1 */
    Vec contraction(static_cast<std::size_t>(d) * m * m, 0.0);
    for (int k1 = 0; k1 < d; ++k1) {
      double eps = 1e-5 * (1.0 + std::fabs(x[k1]));
      Vec xp(x), xm(x);
      xp[k1] += eps;
      xm[k1] -= eps;
      model.diffusion(xp, gp);
      model.diffusion(xm, gm);
      for (int k2 = 0; k2 < d; ++k2)
        for (int j2 = 0; j2 < m; ++j2) {
          double dg = (gp[k2 * m + j2] - gm[k2 * m + j2]) / (2.0 * eps);
          for (int j1 = 0; j1 < m; ++j1)
            contraction[(k2 * m + j2) * m + j1] += dg * g0[k1 * m + j1];
        }
    }
    for (double c : contraction)
      if (std::fabs(c) > rep.worst) {
        rep.worst = std::fabs(c);
        rep.where = x;
      }
  }
  rep.commutative = rep.worst <= tol;
  return rep;
}

double lyapunov_drift_residual(const SdeModel& model,
                               std::span<const double> x) {
  if (!model.lyapunov_u0 || !model.u0_grad || !model.u0_hess)
    fail(ErrorCode::Unsupported,
         "lyapunov_drift_residual: model lacks analytic U0 data");
  int d = model.dim, m = model.noise_dim;
  Vec f(d), g(static_cast<std::size_t>(d) * m), grad(d);
  Vec hess(static_cast<std::size_t>(d) * d);
  model.drift(x, f);
  model.diffusion(x, g);
  model.u0_grad(x, grad);
  model.u0_hess(x, hess);
  double gen = dot(grad, f);
  /* trace(g g* Hess U0) = sum_{i,k} (g g*)_{ik} Hess_{ik} */
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      double ggt = 0.0;
      for (int j = 0; j < m; ++j) ggt += g[i * m + j] * g[k * m + j];
      gen += 0.5 * ggt * hess[i * d + k];
    }
  double gsq = 0.0;
  for (int j = 0; j < m; ++j) {
    double col = 0.0;
    for (int i = 0; i < d; ++i) col += g[i * m + j] * grad[i];
    gsq += col * col;
  }
  double u1 = model.lyapunov_u1 ? model.lyapunov_u1(x) : 0.0;
  return gen + 0.5 * gsq + u1 - model.lyapunov_c -
         model.alpha * model.lyapunov_u0(x);
}

}  // namespace sdekit::models
