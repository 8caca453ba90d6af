#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sdekit/brownian.hpp"
#include "sdekit/models.hpp"

using namespace sdekit;
using models::SdeModel;

namespace {

void dw_grad(std::span<const double> q, std::span<double> out) {
  for (std::size_t i = 0; i < q.size(); ++i)
    out[i] = q[i] * q[i] * q[i] - q[i];
}
double dw_pot(std::span<const double> q) {
  double s = 0.0;
  for (double qi : q) {
    double w = qi * qi - 1.0;
    s += 0.25 * w * w;
  }
  return s;
}
void dw_hess(std::span<const double> q, std::span<double> out) {
  std::size_t m = q.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i) out[i * m + i] = 3.0 * q[i] * q[i] - 1.0;
}

models::LvCoefficients paper_lv() {
  models::LvCoefficients c;
  c.d = 2;
  c.m = 2;
  c.b = {1.0, 0.5};
  c.A = {1.0, 0.5, 0.0, 0.5};
  c.sigma = {1.0, 0.0, 0.0, 0.75};
  return c;
}

double jacobian_fd_err(const SdeModel& mdl, const Vec& x) {
  int d = mdl.dim;
  Vec jac(static_cast<std::size_t>(d) * d);
  mdl.drift_jacobian(x, jac);
  double scale = norm2(jac) + 1.0;
  double worst = 0.0;
  Vec fp(d), fm(d);
  for (int j = 0; j < d; ++j) {
    double eps = 1e-6 * (1.0 + std::fabs(x[j]));
    Vec xp(x), xm(x);
    xp[j] += eps;
    xm[j] -= eps;
    mdl.drift(xp, fp);
    mdl.drift(xm, fm);
    for (int i = 0; i < d; ++i) {
      double fd = (fp[i] - fm[i]) / (2.0 * eps);
      worst = std::max(worst, std::fabs(fd - jac[i * d + j]) / scale);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("lorenz drift and U0 point values") {
  Vec noise(9, 0.0);
  noise[0] = noise[4] = noise[8] = 0.5;
  SdeModel mdl = models::lorenz_additive(10.0, 28.0, 8.0 / 3.0, noise,
                                         {1.0, 2.0, 3.0});
  Vec f(3);
  mdl.drift(Vec{1.0, 2.0, 3.0}, f);
  CHECK(f[0] == doctest::Approx(10.0));
  CHECK(f[1] == doctest::Approx(23.0));
  CHECK(f[2] == doctest::Approx(-6.0));
  CHECK(mdl.lyapunov_u0(Vec{1.0, 2.0, 3.0}) == doctest::Approx(14.0));
  Vec g(9);
  mdl.diffusion(Vec{5.0, -1.0, 0.0}, g);
  CHECK(g == noise);
}

TEST_CASE("langevin drift and diffusion with the double-well potential") {
  SdeModel mdl = models::langevin(dw_grad, dw_pot, 1.0, 2.0, {1.0, 1.0},
                                  dw_hess);
  CHECK(mdl.dim == 2);
  CHECK(mdl.noise_dim == 1);
  Vec f(2);
  mdl.drift(Vec{1.0, 1.0}, f);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(-1.0));
  Vec g(2);
  mdl.diffusion(Vec{1.0, 1.0}, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("brownian dynamics drift") {
  SdeModel mdl = models::brownian_dynamics(dw_grad, dw_pot, 2.0, {2.0},
                                           dw_hess);
  Vec f(1);
  mdl.drift(Vec{2.0}, f);
  CHECK(f[0] == doctest::Approx(-6.0));
  Vec g(1);
  mdl.diffusion(Vec{2.0}, g);
  CHECK(g[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(mdl.lyapunov_u1(Vec{2.0}) > 0.0);
}

TEST_CASE("van der Pol drift at the start point") {
  auto phi = [](double, std::span<double> row) { row[0] = std::sqrt(0.1); };
  SdeModel mdl = models::van_der_pol(0.2, 0.2, 1.0, phi, 1, {0.5, 1.5});
  Vec f(2);
  mdl.drift(Vec{0.5, 1.5}, f);
  CHECK(f[0] == doctest::Approx(1.5));
  CHECK(f[1] == doctest::Approx(-0.275));
  Vec g(2);
  mdl.diffusion(Vec{0.5, 1.5}, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(std::sqrt(0.1)));
}

TEST_CASE("duffing-van der Pol drift") {
  auto phi = [](double x1, std::span<double> row) { row[0] = 0.5 * x1; };
  SdeModel mdl = models::duffing_van_der_pol(1.0, 1.0, 1.0, phi, 1, {1.0, 1.0});
  Vec f(2);
  mdl.drift(Vec{1.0, 1.0}, f);
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(-2.0));
  Vec g(2);
  mdl.diffusion(Vec{1.0, 1.0}, g);
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.5));
}

TEST_CASE("lotka-volterra drift, diffusion, and validation") {
  SdeModel mdl = models::lotka_volterra(paper_lv(), {1.0, 3.0});
  CHECK(mdl.domain == models::Domain::PositiveOrthant);
  Vec f(2);
  mdl.drift(Vec{1.0, 3.0}, f);
  CHECK(f[0] == doctest::Approx(-1.5));
  CHECK(f[1] == doctest::Approx(-3.0));
  Vec g(4);
  mdl.diffusion(Vec{1.0, 3.0}, g);
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == 0.0);
  CHECK(g[2] == 0.0);
  CHECK(g[3] == doctest::Approx(2.25));

  models::LvCoefficients bad = paper_lv();
  bad.A[1] = -0.1;
  CHECK_THROWS_WITH_AS(models::validate(bad),
                       "lotka_volterra: A(0,1) is negative", Error);
  models::LvCoefficients zero_diag = paper_lv();
  zero_diag.A[3] = 0.0;
  CHECK_THROWS_AS(models::validate(zero_diag), Error);
  CHECK_THROWS_AS(models::lotka_volterra(paper_lv(), {1.0, -3.0}), Error);
}

TEST_CASE("analytic jacobians match finite differences") {
  Vec noise(9, 0.0);
  noise[0] = noise[4] = noise[8] = 0.5;
  auto phi = [](double x1, std::span<double> row) { row[0] = 0.8 * x1; };
  std::vector<SdeModel> zoo;
  zoo.push_back(models::lorenz_additive(1.0, 1.0, 1.0, noise, {1.0, 2.0, 3.0}));
  zoo.push_back(models::langevin(dw_grad, dw_pot, 1.0, 2.0, {1.0, 1.0}, dw_hess));
  zoo.push_back(models::brownian_dynamics(dw_grad, dw_pot, 2.0, {1.0}, dw_hess));
  zoo.push_back(models::van_der_pol(0.2, 0.2, 1.0, phi, 1, {0.5, 1.5}));
  zoo.push_back(models::duffing_van_der_pol(1.0, 1.0, 1.0, phi, 1, {1.0, 1.0}));
  zoo.push_back(models::lotka_volterra(paper_lv(), {1.0, 3.0}));
  for (const auto& mdl : zoo) {
    CAPTURE(mdl.name);
    for (std::uint32_t k = 0; k < 50; ++k) {
      Vec x(mdl.dim);
      for (int i = 0; i < mdl.dim; ++i)
        x[i] = mdl.x0[i] + 0.5 * brownian::standard_normal(77, k, 0, i);
      if (mdl.domain == models::Domain::PositiveOrthant)
        for (auto& xi : x) xi = std::fabs(xi) + 0.1;
      CHECK(jacobian_fd_err(mdl, x) < 1e-5);
    }
  }
}

TEST_CASE("commutativity holds for the zoo, fails for gbm") {
  auto phi_mult = [](double x1, std::span<double> row) { row[0] = 0.8 * x1; };
  auto phi_add = [](double, std::span<double> row) { row[0] = std::sqrt(0.1); };
  SdeModel vdp_mult = models::van_der_pol(0.2, 0.2, 1.0, phi_mult, 1,
                                          {0.5, 1.5});
  SdeModel vdp_add = models::van_der_pol(0.2, 0.2, 1.0, phi_add, 1,
                                         {0.5, 1.5});
  Vec noise(9, 0.0);
  noise[0] = noise[4] = noise[8] = 0.5;
  SdeModel lorenz = models::lorenz_additive(1.0, 1.0, 1.0, noise, {1.0, 2.0, 3.0});

  CHECK(models::check_commutativity(vdp_mult, 20, 1e-6).commutative);
  CHECK(models::check_commutativity(vdp_add, 20, 1e-6).commutative);
  CHECK(models::check_commutativity(lorenz, 20, 1e-6).commutative);

  SdeModel g = models::gbm(0.05, 0.2, 1.0);
  models::CommutativityReport rep = models::check_commutativity(g, 20, 1e-6);
  CHECK_FALSE(rep.commutative);
  CHECK(rep.worst > 0.01);
}

TEST_CASE("lotka-volterra one-sided drift bound") {
  models::LvCoefficients c = paper_lv();
  SdeModel mdl = models::lotka_volterra(c, {1.0, 3.0});
  double bnorm = norm2(c.b);
  double anorm = norm2(c.A);
  Vec f1(2), f2(2);
  for (std::uint32_t k = 0; k < 500; ++k) {
    Vec x(2), y(2);
    for (int i = 0; i < 2; ++i) {
      x[i] = std::fabs(brownian::standard_normal(31, k, 0, i)) * 2.0 + 1e-3;
      y[i] = std::fabs(brownian::standard_normal(31, k, 1, i)) * 2.0 + 1e-3;
    }
    mdl.drift(x, f1);
    mdl.drift(y, f2);
    double lhs = 0.0, d2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      lhs += (x[i] - y[i]) * (f1[i] - f2[i]);
      d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    CHECK(lhs <= (bnorm + anorm * norm2(x)) * d2 + 1e-12);
  }
}

TEST_CASE("lotka-volterra Lyapunov drift condition holds numerically") {
  SdeModel mdl = models::lotka_volterra(paper_lv(), {1.0, 3.0});
  for (std::uint32_t k = 0; k < 500; ++k) {
    Vec x(2);
    for (int i = 0; i < 2; ++i)
      x[i] = std::fabs(brownian::standard_normal(57, k, 0, i)) * 3.0 + 1e-3;
    CHECK(models::lyapunov_drift_residual(mdl, x) <= 1e-9);
  }
}

TEST_CASE("gbm calibration model") {
  SdeModel g = models::gbm(0.05, 0.2, 1.0);
  Vec f(1), gg(1);
  g.drift(Vec{2.0}, f);
  g.diffusion(Vec{2.0}, gg);
  CHECK(f[0] == doctest::Approx(0.1));
  CHECK(gg[0] == doctest::Approx(0.4));
}
