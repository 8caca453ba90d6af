#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sdekit/brownian.hpp"
#include "sdekit/common.hpp"
#include "sdekit/diagnostics.hpp"
#include "sdekit/harness.hpp"
#include "sdekit/models.hpp"
#include "sdekit/schemes.hpp"

using namespace sdekit;

namespace {

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() ||
          std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

struct Verdict {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  bool deterministic = false;
  double seconds = 0.0; /* official single-worker run */
};

/* Runs compute at one worker (timed official run), then again at one, four
 * and eight workers; all numeric payloads must agree bit for bit. */
template <class Compute>
auto check_determinism(Verdict& v, Compute&& compute) {
  double t0 = now_s();
  auto official = compute(1);
  v.seconds = now_s() - t0;
  v.deterministic = bits_equal(official.fp, compute(1).fp) &&
                    bits_equal(official.fp, compute(4).fp) &&
                    bits_equal(official.fp, compute(8).fp);
  return official;
}

void announce(const Verdict& v) {
  std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", v.index,
              v.name.c_str(), v.detail.c_str(), v.seconds);
  std::fflush(stdout);
}

template <class Body>
Verdict run_criterion(int index, const char* name, Body&& body) {
  Verdict v;
  v.index = index;
  v.name = name;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.deterministic = false;
    v.detail = std::string("threw: ") + e.what();
  }
  announce(v);
  return v;
}

harness::StrongErrorSpec desk_spec(schemes::SchemeKind kind,
                                   std::int64_t paths, int threads) {
  harness::StrongErrorSpec spec;
  spec.scheme = kind;
  spec.seed = 1;
  spec.paths = paths;
  spec.levels = {6, 7, 8, 9, 10};
  spec.ref_level = 12;
  spec.horizon = 1.0;
  spec.r_order = 2.0;
  spec.threads = threads;
  return spec;
}

void append_rate_fp(std::vector<double>& fp, const harness::RateReport& rep) {
  fp.push_back(rep.slope);
  fp.push_back(rep.intercept);
  fp.push_back(rep.residual);
  for (const harness::LevelError& le : rep.levels) {
    fp.push_back(le.error);
    fp.push_back(static_cast<double>(le.paths_used));
    fp.push_back(static_cast<double>(le.diverged));
  }
}

models::SdeModel make_langevin() {
  models::GradFn grad = [](std::span<const double> q, std::span<double> out) {
    for (std::size_t i = 0; i < q.size(); ++i)
      out[i] = q[i] * q[i] * q[i] - q[i];
  };
  models::PotFn pot = [](std::span<const double> q) {
    double s = 0.0;
    for (double c : q) {
      double w = c * c - 1.0;
      s += 0.25 * w * w;
    }
    return s;
  };
  models::VecFn hess = [](std::span<const double> q, std::span<double> out) {
    std::size_t m = q.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      out[i * m + i] = 3.0 * q[i] * q[i] - 1.0;
  };
  return models::langevin(grad, pot, 1.0, 2.0, {1.0, 1.0}, hess);
}

models::LvCoefficients lv_reference_coeffs() {
  models::LvCoefficients c;
  c.d = 2;
  c.m = 2;
  c.b = {1.0, 0.5};
  c.A = {1.0, 0.5, 0.0, 0.5};
  c.sigma = {1.0, 0.0, 0.0, 0.75};
  return c;
}

/* ---------------------------------------------------------------- 1 */

void criterion_calibration(Verdict& v) {
  struct Out {
    harness::RateReport rep;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    o.rep = harness::gbm_calibration(
        0.05, 0.2, 1.0, desk_spec(schemes::SchemeKind::Em, 2000, threads));
    append_rate_fp(o.fp, o.rep);
    return o;
  });
  bool slope_ok = run.rep.slope >= 0.4 && run.rep.slope <= 0.6;
  bool time_ok = v.seconds < 30.0;
  v.pass = slope_ok && time_ok;
  v.detail = fmt("slope %.3f in [0.40, 0.60], %.1f s of 30 s budget",
                 run.rep.slope, v.seconds);
}

/* ---------------------------------------------------------------- 2 */

void criterion_langevin_rate(Verdict& v) {
  models::SdeModel model = make_langevin();
  struct Out {
    harness::RateReport rep;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    o.rep = harness::strong_error(
        model, desk_spec(schemes::SchemeKind::Sitem, 500, threads));
    append_rate_fp(o.fp, o.rep);
    return o;
  });
  bool slope_ok = run.rep.slope >= 0.8 && run.rep.slope <= 1.2;
  bool time_ok = v.seconds < 300.0;
  v.pass = slope_ok && time_ok;
  v.detail = fmt("slope %.3f in [0.80, 1.20], %.1f s of 300 s budget",
                 run.rep.slope, v.seconds);
}

/* ---------------------------------------------------------------- 3 */

void criterion_vdp_rates(Verdict& v) {
  models::SdeModel additive =
      models::van_der_pol_additive(0.2, 0.2, 1.0, std::sqrt(0.1), 1,
                                   {0.5, 1.5});
  models::SdeModel multiplicative = models::van_der_pol(
      0.2, 0.2, 1.0,
      [](double x1, std::span<double> row) { row[0] = 0.8 * x1; }, 1,
      {0.5, 1.5});
  struct Out {
    double add_slope = 0.0, mult_slope = 0.0;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    harness::StrongErrorSpec spec =
        desk_spec(schemes::SchemeKind::Sitem, 500, threads);
    harness::RateReport ra = harness::strong_error(additive, spec);
    harness::RateReport rm = harness::strong_error(multiplicative, spec);
    o.add_slope = ra.slope;
    o.mult_slope = rm.slope;
    append_rate_fp(o.fp, ra);
    append_rate_fp(o.fp, rm);
    return o;
  });
  auto ok = [](double s) { return s >= 0.8 && s <= 1.2; };
  v.pass = ok(run.add_slope) && ok(run.mult_slope);
  v.detail = fmt("additive slope %.3f, state-dependent slope %.3f, both in "
                 "[0.80, 1.20]",
                 run.add_slope, run.mult_slope);
}

/* ---------------------------------------------------------------- 4 */

void criterion_lorenz_duffing_rates(Verdict& v) {
  models::SdeModel lorenz = models::lorenz_additive(
      1.0, 1.0, 1.0, {0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5},
      {1.0, 2.0, 3.0});
  models::SdeModel duffing = models::duffing_van_der_pol(
      1.0, 1.0, 1.0,
      [](double x1, std::span<double> row) { row[0] = 0.5 * x1; }, 1,
      {1.0, 1.0});
  struct Out {
    double lorenz_slope = 0.0, duffing_slope = 0.0;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    harness::StrongErrorSpec spec =
        desk_spec(schemes::SchemeKind::Sitem, 500, threads);
    harness::RateReport rl = harness::strong_error(lorenz, spec);
    harness::RateReport rd = harness::strong_error(duffing, spec);
    o.lorenz_slope = rl.slope;
    o.duffing_slope = rd.slope;
    append_rate_fp(o.fp, rl);
    append_rate_fp(o.fp, rd);
    return o;
  });
  auto ok = [](double s) { return s >= 0.75 && s <= 1.25; };
  v.pass = ok(run.lorenz_slope) && ok(run.duffing_slope);
  v.detail = fmt("Lorenz slope %.3f, Duffing-van der Pol slope %.3f, both in "
                 "[0.75, 1.25]",
                 run.lorenz_slope, run.duffing_slope);
}

/* ---------------------------------------------------------------- 5 */

void criterion_lv_rate(Verdict& v) {
  models::SdeModel model = models::lotka_volterra(lv_reference_coeffs(),
                                                  {1.0, 3.0});
  struct Out {
    harness::RateReport rep;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    o.rep = harness::strong_error(
        model, desk_spec(schemes::SchemeKind::LvMilstein, 500, threads));
    append_rate_fp(o.fp, o.rep);
    return o;
  });
  v.pass = run.rep.slope >= 0.85 && run.rep.slope <= 1.15;
  v.detail = fmt("slope %.3f in [0.85, 1.15]", run.rep.slope);
}

/* ---------------------------------------------------------------- 6 */

void criterion_lv_positivity(Verdict& v) {
  struct Set {
    models::LvCoefficients c;
    Vec x0;
    double h = 0.0;
  };
  std::vector<Set> sets;
  {
    Set paper;
    paper.c = lv_reference_coeffs();
    paper.x0 = {1.0, 3.0};
    paper.h = std::min(schemes::lv_step_guard(paper.c, 2.0, 1e18).h_max, 1.0);
    sets.push_back(paper);

    std::mt19937_64 rng(20260825);
    std::uniform_int_distribution<int> dims(1, 4), noise(1, 3);
    std::uniform_real_distribution<double> growth(-1.0, 1.5), diag(0.2, 2.0),
        off(0.0, 0.8), load(-1.2, 1.2), start(0.1, 3.0);
    for (int k = 0; k < 20; ++k) {
      Set s;
      s.c.d = dims(rng);
      s.c.m = noise(rng);
      s.c.b.resize(s.c.d);
      for (double& b : s.c.b) b = growth(rng);
      s.c.A.assign(static_cast<std::size_t>(s.c.d) * s.c.d, 0.0);
      for (int i = 0; i < s.c.d; ++i)
        for (int j = 0; j < s.c.d; ++j)
          s.c.A[static_cast<std::size_t>(i) * s.c.d + j] =
              i == j ? diag(rng) : off(rng);
      s.c.sigma.resize(static_cast<std::size_t>(s.c.d) * s.c.m);
      for (double& x : s.c.sigma) x = load(rng);
      s.x0.resize(s.c.d);
      for (double& x : s.x0) x = start(rng);
      models::validate(s.c);
      /* stay well below h_max for the random draws: strongly extinct
       * regimes must not decay past the denormal range within 10^4 steps */
      s.h = std::min(schemes::lv_step_guard(s.c, 2.0, 1e18).h_max, 0.0078125);
      sets.push_back(s);
    }
  }
  constexpr std::int64_t kSteps = 10000;
  constexpr std::int64_t kPaths = 100;
  struct Out {
    double global_min = std::numeric_limits<double>::infinity();
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    for (std::size_t si = 0; si < sets.size(); ++si) {
      const Set& s = sets[si];
      models::SdeModel model = models::lotka_volterra(s.c, s.x0);
      schemes::SchemeParams params;
      std::vector<double> mins(kPaths, 0.0);
      harness::parallel_paths(kPaths, threads, [&](std::int64_t p) {
        schemes::Trajectory t = schemes::run_streaming(
            model, schemes::SchemeKind::LvMilstein, params, 600 + si,
            static_cast<std::uint64_t>(p), s.h, kSteps, 1);
        double worst = std::numeric_limits<double>::infinity();
        bool bad = t.diverged_at >= 0;
        for (double y : t.states) {
          if (!std::isfinite(y) || y <= 0.0)
            bad = true;
          else
            worst = std::min(worst, y);
        }
        mins[static_cast<std::size_t>(p)] = bad ? -1.0 : worst;
      });
      double set_min = mins[0];
      for (double m : mins) set_min = std::min(set_min, m);
      o.fp.push_back(set_min);
      o.global_min = std::min(o.global_min, set_min);
    }
    return o;
  });
  v.pass = run.global_min > 0.0;
  v.detail = fmt("smallest iterate %.2e across 21 coefficient sets x %lld "
                 "paths x %lld steps (must be > 0)",
                 run.global_min, static_cast<long long>(kPaths),
                 static_cast<long long>(kSteps));
}

/* ---------------------------------------------------------------- 7 */

Vec randn7(std::uint64_t path, std::uint32_t step, int d, double scale) {
  Vec v(d);
  for (int i = 0; i < d; ++i)
    v[i] = scale * brownian::standard_normal(4099, path, step,
                                             static_cast<std::uint32_t>(i));
  return v;
}

Vec unit_dir7(std::uint64_t path, std::uint32_t step, int d) {
  Vec v = randn7(path, step, d, 1.0);
  double n = norm2(v);
  for (double& x : v) x /= n;
  return v;
}

double fd1_err(const Vec& z, const Vec& u, double delta) {
  double eps = 1e-6 * (1.0 + norm2(z));
  int d = static_cast<int>(z.size());
  Vec zp(d), zm(d);
  for (int i = 0; i < d; ++i) {
    zp[i] = z[i] + eps * u[i];
    zm[i] = z[i] - eps * u[i];
  }
  Vec fp = taming::psi(zp, delta);
  Vec fm = taming::psi(zm, delta);
  Vec exact = taming::psi1_apply(z, u, delta);
  Vec diff(d);
  for (int i = 0; i < d; ++i)
    diff[i] = (fp[i] - fm[i]) / (2 * eps) - exact[i];
  return norm2(diff) / std::max(norm2(exact), 1e-8);
}

double fd2_err(const Vec& z, const Vec& u, double delta) {
  double eps = 1e-4 * (1.0 + norm2(z));
  int d = static_cast<int>(z.size());
  Vec zp(d), zm(d);
  for (int i = 0; i < d; ++i) {
    zp[i] = z[i] + eps * u[i];
    zm[i] = z[i] - eps * u[i];
  }
  Vec fp = taming::psi(zp, delta);
  Vec f0 = taming::psi(z, delta);
  Vec fm = taming::psi(zm, delta);
  Vec exact = taming::psi2_apply(z, u, delta);
  Vec diff(d);
  for (int i = 0; i < d; ++i)
    diff[i] = (fp[i] - 2 * f0[i] + fm[i]) / (eps * eps) - exact[i];
  /* floor the denominator: relative error is meaningless where the second
   * derivative nearly vanishes */
  return norm2(diff) / std::max(norm2(exact), 1e-2);
}

void criterion_taming_bounds(Verdict& v) {
  constexpr std::uint32_t kPoints = 10000;
  constexpr std::uint32_t kDirs = 64;
  constexpr double kSlack = 1.1;
  struct Out {
    double worst_ratio = 0.0;
    double worst_fd1 = 0.0;
    double worst_fd2 = 0.0;
    std::vector<double> fp;
  };
  auto compute = [&]() {
    Out o;
    for (double delta : {2.0, 3.0, 4.0}) {
      double r1 = 0.0, r2 = 0.0, r3 = 0.0, e1 = 0.0, e2 = 0.0;
      for (std::uint32_t k = 0; k < kPoints; ++k) {
        Vec z = randn7(1, k, 3, 1.5);
        double n = norm2(z);
        double bound1 = 1.0 + delta / 4.0;
        double bound2 =
            std::min(1.0 + delta / 4.0, (delta + 1.0) * std::pow(n, delta));
        double bound3 = (3.0 * delta * delta + delta) *
                        std::min(1.0, std::pow(n, delta - 1.0));
        for (std::uint32_t j = 0; j < kDirs; ++j) {
          Vec u = unit_dir7(2, k * kDirs + j, 3);
          Vec p1 = taming::psi1_apply(z, u, delta);
          r1 = std::max(r1, norm2(p1) / bound1);
          Vec p1mi(3);
          for (int i = 0; i < 3; ++i) p1mi[i] = p1[i] - u[i];
          r2 = std::max(r2, norm2(p1mi) / bound2);
          r3 =
              std::max(r3, norm2(taming::psi2_apply(z, u, delta)) / bound3);
        }
        Vec zf = randn7(3, k, 3, 1.0);
        Vec uf = unit_dir7(4, k, 3);
        e1 = std::max(e1, fd1_err(zf, uf, delta));
        e2 = std::max(e2, fd2_err(zf, uf, delta));
      }
      o.worst_ratio = std::max({o.worst_ratio, r1, r2, r3});
      o.worst_fd1 = std::max(o.worst_fd1, e1);
      o.worst_fd2 = std::max(o.worst_fd2, e2);
      o.fp.insert(o.fp.end(), {r1, r2, r3, e1, e2});
    }
    return o;
  };
  double t0 = now_s();
  Out run = compute();
  v.seconds = now_s() - t0;
  /* pure function evaluation: no worker pool, rerun must reproduce bits */
  v.deterministic = bits_equal(run.fp, compute().fp);
  v.pass = run.worst_ratio <= kSlack && run.worst_fd1 < 1e-5 &&
           run.worst_fd2 < 1e-3;
  v.detail = fmt("worst bound ratio %.3f (allowed %.2f); FD errors %.1e "
                 "(< 1e-5) and %.1e (< 1e-3)",
                 run.worst_ratio, kSlack, run.worst_fd1, run.worst_fd2);
}

/* ---------------------------------------------------------------- 8 */

void criterion_defect_orders(Verdict& v) {
  models::SdeModel model = make_langevin();
  struct Out {
    diagnostics::DefectReport rep;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    diagnostics::DefectParams params;
    params.taming.delta = 3.0;
    params.p = 4.0;
    params.q = 4.0;
    params.seed = 1;
    params.paths = 200;
    params.coarse_levels = {6, 7, 8, 9};
    params.fine_level = 12;
    params.horizon = 1.0;
    params.threads = threads;
    o.rep = diagnostics::defect_integrals(model, params);
    o.fp = {o.rep.drift_slope, o.rep.diffusion_slope, o.rep.v};
    for (const diagnostics::DefectLevel& lv : o.rep.levels) {
      o.fp.push_back(lv.drift_defect);
      o.fp.push_back(lv.diffusion_defect);
      o.fp.push_back(lv.exp_weight_log);
      o.fp.push_back(lv.lhs);
      o.fp.push_back(lv.implied_constant);
    }
    return o;
  });
  bool drift_ok =
      run.rep.drift_slope >= 1.5 && run.rep.drift_slope <= 2.5;
  bool diff_ok =
      run.rep.diffusion_slope >= 1.7 && run.rep.diffusion_slope <= 2.3;
  v.pass = drift_ok && diff_ok;
  v.detail = fmt("drift slope %.3f in [1.50, 2.50]; diffusion slope %.3f in "
                 "[1.70, 2.30]",
                 run.rep.drift_slope, run.rep.diffusion_slope);
}

/* ---------------------------------------------------------------- 9 */

void criterion_lv_boundedness(Verdict& v) {
  models::SdeModel model = models::lotka_volterra(lv_reference_coeffs(),
                                                  {1.0, 3.0});
  const double orders[] = {1.0, 2.0};
  struct Out {
    double max1[2] = {0.0, 0.0};
    double at1[2] = {0.0, 0.0};
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    int idx = 0;
    for (double h : {0.0078125, 1.0}) {
      harness::MomentSeries ms = harness::longtime_moments(
          model, schemes::SchemeKind::LvMilstein, schemes::SchemeParams{}, 1,
          2000, h, 500.0, orders, 1.0, threads);
      double mx = 0.0;
      for (std::size_t t = 0; t < ms.times.size(); ++t)
        mx = std::max(mx, ms.moments[t * 2]);
      o.max1[idx] = mx;
      o.at1[idx] = ms.moments[2]; /* t = 1, order 1 */
      o.fp.push_back(mx);
      o.fp.push_back(o.at1[idx]);
      o.fp.push_back(ms.mean_square_time_average);
      o.fp.push_back(static_cast<double>(ms.alive.back()));
      ++idx;
    }
    return o;
  });
  bool ok_small = run.max1[0] <= 10.0 * run.at1[0];
  bool ok_large = run.max1[1] <= 10.0 * run.at1[1];
  v.pass = ok_small && ok_large;
  v.detail = fmt("h=2^-7: max_t E|Y| %.3f vs 10 E|Y_1| %.3f; h=1: %.3f vs "
                 "%.3f",
                 run.max1[0], 10.0 * run.at1[0], run.max1[1],
                 10.0 * run.at1[1]);
}

/* --------------------------------------------------------------- 10 */

void criterion_stationary_behavior(Verdict& v) {
  models::SdeModel lang = make_langevin();
  models::LvCoefficients base = lv_reference_coeffs();
  models::LvCoefficients doubled = base;
  for (double& s : doubled.sigma) s *= 2.0;
  models::SdeModel permanent = models::lotka_volterra(base, {1.0, 3.0});
  models::SdeModel extinct = models::lotka_volterra(doubled, {1.0, 3.0});
  struct Out {
    harness::DensityReport dr;
    double med_ext = 0.0, med_perm = 0.0;
    std::vector<double> fp;
  };
  Out run = check_determinism(v, [&](int threads) {
    Out o;
    o.dr = harness::stationary_density_check(
        lang, schemes::SchemeKind::Sitem, schemes::SchemeParams{}, 1, 20,
        0.0078125, 100.0, 400.0, 64, threads);
    schemes::SchemeParams params;
    o.med_ext = harness::median(harness::terminal_abs(
        extinct, schemes::SchemeKind::LvMilstein, params, 1, 500, 0.125,
        500.0, threads));
    o.med_perm = harness::median(harness::terminal_abs(
        permanent, schemes::SchemeKind::LvMilstein, params, 1, 500, 0.125,
        500.0, threads));
    o.fp = {o.dr.l1_distance, o.dr.analytic_mass,
            static_cast<double>(o.dr.samples), o.med_ext, o.med_perm};
    return o;
  });
  bool density_ok = run.dr.l1_distance < 0.15;
  bool ext_ok = run.med_ext < 0.05;
  bool perm_ok = run.med_perm > 0.1;
  v.pass = density_ok && ext_ok && perm_ok;
  v.detail = fmt("density L1 %.3f (< 0.15); extinction median %.2e (< 0.05); "
                 "permanence median %.3f (> 0.10)",
                 run.dr.l1_distance, run.med_ext, run.med_perm);
}

/* --------------------------------------------------------------- 11 */

Verdict criterion_determinism(const std::vector<Verdict>& prior) {
  Verdict v;
  v.index = 11;
  v.name = "bit-identical reruns across worker counts 1, 4 and 8";
  std::string bad;
  for (const Verdict& p : prior) {
    if (p.deterministic) continue;
    if (!bad.empty()) bad += ", ";
    bad += std::to_string(p.index);
  }
  v.pass = bad.empty();
  v.deterministic = v.pass;
  v.detail = bad.empty()
                 ? "all criterion payloads reproduced bit for bit"
                 : "payload mismatch at criteria " + bad;
  announce(v);
  return v;
}

}  // namespace

int main() {
  std::printf("acceptance: strong approximation without global "
              "monotonicity\n");
  std::fflush(stdout);
  std::vector<Verdict> verdicts;
  verdicts.push_back(
      run_criterion(1, "harness calibration on geometric Brownian motion",
                    criterion_calibration));
  verdicts.push_back(run_criterion(
      2, "order-one strong rate on Langevin dynamics", criterion_langevin_rate));
  verdicts.push_back(run_criterion(
      3, "order-one strong rate on the van der Pol oscillator",
      criterion_vdp_rates));
  verdicts.push_back(run_criterion(
      4, "order-one strong rate on Lorenz and Duffing-van der Pol",
      criterion_lorenz_duffing_rates));
  verdicts.push_back(run_criterion(
      5, "order-one strong rate of the Lotka-Volterra Milstein scheme",
      criterion_lv_rate));
  verdicts.push_back(run_criterion(
      6, "strict positivity of Lotka-Volterra iterates",
      criterion_lv_positivity));
  verdicts.push_back(run_criterion(
      7, "taming derivative bounds and finite-difference consistency",
      criterion_taming_bounds));
  verdicts.push_back(run_criterion(8, "interpolant defect decay orders",
                                   criterion_defect_orders));
  verdicts.push_back(run_criterion(
      9, "long-horizon moment boundedness of the Lotka-Volterra scheme",
      criterion_lv_boundedness));
  verdicts.push_back(run_criterion(
      10, "stationary density match, extinction and permanence",
      criterion_stationary_behavior));
  verdicts.push_back(criterion_determinism(verdicts));

  int passed = 0;
  for (const Verdict& v : verdicts) passed += v.pass ? 1 : 0;
  std::printf("%d/%d criteria passed\n", passed,
              static_cast<int>(verdicts.size()));
  return passed == static_cast<int>(verdicts.size()) ? 0 : 1;
}
