#include "sdekit/schemes.hpp"

#include <cmath>

namespace sdekit::schemes {

namespace {

void check_grid_model(const models::SdeModel& model,
                      const brownian::IncrementGrid& grid) {
  if (model.noise_dim != grid.noise_dim)
    fail(ErrorCode::InvalidArgument,
         "scheme: model noise_dim " + std::to_string(model.noise_dim) +
             " does not match grid noise_dim " +
             std::to_string(grid.noise_dim));
  if (!model.drift || !model.diffusion)
    fail(ErrorCode::InvalidArgument, "scheme: model lacks drift or diffusion");
}

void check_real_domain(const models::SdeModel& model, const char* scheme) {
  if (model.domain != models::Domain::RealSpace)
    fail(ErrorCode::Unsupported,
         std::string(scheme) + ": model domain must be all of R^d");
}

std::int64_t check_stride(std::int64_t steps, std::int64_t stride) {
  if (stride < 1 || steps % stride != 0)
    fail(ErrorCode::InvalidArgument,
         "scheme: record stride must divide the step count");
  return steps / stride;
}

struct Recorder {
  Trajectory traj;
  std::int64_t next = 0;

  Recorder(int dim, std::int64_t steps, std::int64_t stride) {
    traj.dim = dim;
    traj.stride = stride;
    traj.states.reserve((check_stride(steps, stride) + 1) * dim);
  }
  void record(std::int64_t step, const Vec& y) {
    if (step % traj.stride == 0)
      traj.states.insert(traj.states.end(), y.begin(), y.end());
  }
};

}  // namespace

SchemeKind scheme_from_name(const std::string& name) {
  if (name == "em") return SchemeKind::Em;
  if (name == "tamed_em") return SchemeKind::TamedEm;
  if (name == "sitem") return SchemeKind::Sitem;
  if (name == "lv_milstein") return SchemeKind::LvMilstein;
  fail(ErrorCode::Config,
       "unknown scheme '" + name +
           "' (valid: em, tamed_em, sitem, lv_milstein)");
}

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Em: return "em";
    case SchemeKind::TamedEm: return "tamed_em";
    case SchemeKind::Sitem: return "sitem";
    case SchemeKind::LvMilstein: return "lv_milstein";
  }
  fail(ErrorCode::Internal, "scheme_name: bad kind");
}

double sitem_threshold(double h) {
  if (!(h > 0.0) || !(h < 1.0))
    fail(ErrorCode::InvalidArgument,
         "sitem: stepsize must satisfy 0 < h < 1");
  return std::exp(std::sqrt(std::fabs(std::log(h))));
}

namespace {

/* Shared explicit-step loop; `tame` selects plain Euler, tamed Euler, or the
 * stopped tamed scheme (threshold > 0). */
Trajectory explicit_loop(const models::SdeModel& model, std::int64_t steps,
                         double h, std::int64_t stride, double threshold,
                         bool tame, double delta,
                         const std::function<const double*(std::int64_t)>& dw_at) {
  int d = model.dim, m = model.noise_dim;
  Recorder rec(d, steps, stride);
  Vec y(model.x0);
  Vec f(d), g(static_cast<std::size_t>(d) * m), incr(d);
  rec.record(0, y);
  for (std::int64_t n = 0; n < steps; ++n) {
    bool active = true;
    if (threshold > 0.0 && rec.traj.stop_index < 0 && norm2(y) >= threshold)
      rec.traj.stop_index = n;
    if (rec.traj.stop_index >= 0) active = false;
    if (active && rec.traj.diverged_at < 0) {
      const double* dw = dw_at(n);
      model.drift(y, f);
      model.diffusion(y, g);
      for (int i = 0; i < d; ++i) {
        double s = f[i] * h;
        for (int j = 0; j < m; ++j) s += g[i * m + j] * dw[j];
        incr[i] = s;
      }
      if (tame) {
        taming::psi(incr, delta, incr);
      }
      for (int i = 0; i < d; ++i) y[i] += incr[i];
      if (!all_finite(y) && rec.traj.diverged_at < 0)
        rec.traj.diverged_at = n + 1;
    }
    rec.record(n + 1, y);
  }
  return std::move(rec.traj);
}

}  // namespace

Trajectory em_trajectory(const models::SdeModel& model,
                         const brownian::IncrementGrid& grid,
                         std::int64_t stride) {
  check_grid_model(model, grid);
  check_real_domain(model, "em");
  int m = grid.noise_dim;
  const double* base = grid.increments.data();
  return explicit_loop(model, grid.steps(), grid.h(), stride, 0.0, false, 0.0,
                       [base, m](std::int64_t n) { return base + n * m; });
}

Trajectory tamed_em_trajectory(const models::SdeModel& model,
                               const brownian::IncrementGrid& grid,
                               const taming::TamingParams& params,
                               std::int64_t stride) {
  check_grid_model(model, grid);
  check_real_domain(model, "tamed_em");
  taming::validate(params);
  int m = grid.noise_dim;
  const double* base = grid.increments.data();
  return explicit_loop(model, grid.steps(), grid.h(), stride, 0.0, true,
                       params.delta,
                       [base, m](std::int64_t n) { return base + n * m; });
}

Trajectory sitem_trajectory(const models::SdeModel& model,
                            const brownian::IncrementGrid& grid,
                            const taming::TamingParams& params,
                            std::int64_t stride) {
  check_grid_model(model, grid);
  check_real_domain(model, "sitem");
  taming::validate(params);
  double threshold = sitem_threshold(grid.h());
  int m = grid.noise_dim;
  const double* base = grid.increments.data();
  return explicit_loop(model, grid.steps(), grid.h(), stride, threshold, true,
                       params.delta,
                       [base, m](std::int64_t n) { return base + n * m; });
}

LvStepGuard lv_step_guard(const models::LvCoefficients& coeffs, double gamma,
                          double horizon) {
  models::validate(coeffs);
  if (!(gamma > 1.0))
    fail(ErrorCode::InvalidArgument, "lv_milstein: gamma must exceed 1");
  if (!(horizon > 0.0))
    fail(ErrorCode::InvalidArgument, "lv_milstein: horizon must be positive");
  LvStepGuard guard;
  guard.gamma = gamma;
  guard.h_max = horizon;
  for (int i = 0; i < coeffs.d; ++i) {
    double rowsq = 0.0;
    for (int j = 0; j < coeffs.m; ++j) {
      double s = coeffs.sigma[i * coeffs.m + j];
      rowsq += s * s;
    }
    double excess = coeffs.b[i] - 0.5 * rowsq;
    if (excess > 0.0) guard.h_max = std::min(guard.h_max, 1.0 / (gamma * excess));
  }
  return guard;
}

namespace {

Trajectory lv_loop(const models::LvCoefficients& c, const Vec& x0,
                   std::int64_t steps, double h, std::int64_t stride,
                   const std::function<const double*(std::int64_t)>& dw_at) {
  int d = c.d, m = c.m;
  Recorder rec(d, steps, stride);
  Vec y(x0);
  Vec rowsq(d, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < m; ++j) {
      double s = c.sigma[i * m + j];
      rowsq[i] += s * s;
    }
  Vec ynew(d);
  rec.record(0, y);
  for (std::int64_t n = 0; n < steps; ++n) {
    const double* dw = dw_at(n);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < m; ++j) s += c.sigma[i * m + j] * dw[j];
      double numer = 0.5 * (1.0 + s) * (1.0 + s) + 0.5;
      double q = 1.0 - c.b[i] * h + 0.5 * h * rowsq[i];
      for (int j = 0; j < d; ++j) q += h * c.A[i * d + j] * y[j];
      if (!(q > 0.0))
        fail(ErrorCode::Internal,
             "lv_milstein: pivot became nonpositive at step " +
                 std::to_string(n));
      ynew[i] = y[i] * numer / q;
    }
    y = ynew;
    rec.record(n + 1, y);
  }
  return std::move(rec.traj);
}

}  // namespace

Trajectory lv_milstein_trajectory(const models::SdeModel& model,
                                  const brownian::IncrementGrid& grid,
                                  double gamma, std::int64_t stride) {
  if (model.name != "lotka_volterra")
    fail(ErrorCode::Unsupported,
         "lv_milstein: scheme applies to lotka_volterra models only");
  check_grid_model(model, grid);
  LvStepGuard guard = lv_step_guard(model.lv, gamma, grid.horizon);
  if (grid.h() > guard.h_max * (1.0 + 1e-12))
    fail(ErrorCode::InvalidArgument,
         "lv_milstein: stepsize " + std::to_string(grid.h()) +
             " exceeds admissible h_max " + std::to_string(guard.h_max));
  int m = grid.noise_dim;
  const double* base = grid.increments.data();
  return lv_loop(model.lv, model.x0, grid.steps(), grid.h(), stride,
                 [base, m](std::int64_t n) { return base + n * m; });
}

Trajectory run_on_grid(const models::SdeModel& model, SchemeKind kind,
                       const SchemeParams& params,
                       const brownian::IncrementGrid& grid,
                       std::int64_t stride) {
  switch (kind) {
    case SchemeKind::Em:
      return em_trajectory(model, grid, stride);
    case SchemeKind::TamedEm:
      return tamed_em_trajectory(model, grid, params.taming, stride);
    case SchemeKind::Sitem:
      return sitem_trajectory(model, grid, params.taming, stride);
    case SchemeKind::LvMilstein:
      return lv_milstein_trajectory(model, grid, params.lv_gamma, stride);
  }
  fail(ErrorCode::Internal, "run_on_grid: bad scheme kind");
}

Trajectory run_streaming(const models::SdeModel& model, SchemeKind kind,
                         const SchemeParams& params, std::uint64_t seed,
                         std::uint64_t path_id, double h,
                         std::int64_t n_steps, std::int64_t record_stride) {
  if (!(h > 0.0) || n_steps < 1)
    fail(ErrorCode::InvalidArgument, "run_streaming: need h > 0 and steps >= 1");
  int m = model.noise_dim;
  Vec dw(m);
  auto dw_at = [&](std::int64_t n) {
    brownian::step_increments(seed, path_id, static_cast<std::uint32_t>(n), m,
                              h, dw.data());
    return dw.data();
  };
  switch (kind) {
    case SchemeKind::Em:
      check_real_domain(model, "em");
      return explicit_loop(model, n_steps, h, record_stride, 0.0, false, 0.0,
                           dw_at);
    case SchemeKind::TamedEm:
      check_real_domain(model, "tamed_em");
      taming::validate(params.taming);
      return explicit_loop(model, n_steps, h, record_stride, 0.0, true,
                           params.taming.delta, dw_at);
    case SchemeKind::Sitem: {
      check_real_domain(model, "sitem");
      taming::validate(params.taming);
      double threshold = sitem_threshold(h);
      return explicit_loop(model, n_steps, h, record_stride, threshold, true,
                           params.taming.delta, dw_at);
    }
    case SchemeKind::LvMilstein: {
      if (model.name != "lotka_volterra")
        fail(ErrorCode::Unsupported,
             "lv_milstein: scheme applies to lotka_volterra models only");
      LvStepGuard guard =
          lv_step_guard(model.lv, params.lv_gamma, h * double(n_steps));
      if (h > guard.h_max * (1.0 + 1e-12))
        fail(ErrorCode::InvalidArgument,
             "lv_milstein: stepsize " + std::to_string(h) +
                 " exceeds admissible h_max " + std::to_string(guard.h_max));
      return lv_loop(model.lv, model.x0, n_steps, h, record_stride, dw_at);
    }
  }
  fail(ErrorCode::Internal, "run_streaming: bad scheme kind");
}

SitemDefects sitem_defects(const models::SdeModel& model,
                           const taming::TamingParams& params,
                           std::span<const double> y_n, bool active, double dt,
                           std::span<const double> dw) {
  taming::validate(params);
  int d = model.dim, m = model.noise_dim;
  SitemDefects out;
  out.z.resize(d);
  out.a.resize(d);
  out.b.resize(static_cast<std::size_t>(d) * m);
  out.y_s.assign(y_n.begin(), y_n.end());
  Vec f(d), g(static_cast<std::size_t>(d) * m);
  model.drift(y_n, f);
  model.diffusion(y_n, g);
  for (int i = 0; i < d; ++i) {
    double s = f[i] * dt;
    for (int j = 0; j < m; ++j) s += g[i * m + j] * dw[j];
    out.z[i] = s;
  }
  taming::psi1_apply(out.z, f, params.delta, out.a);
  Vec col(d), tmp(d);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) col[i] = g[i * m + j];
    taming::psi2_apply(out.z, col, params.delta, tmp);
    for (int i = 0; i < d; ++i) out.a[i] += 0.5 * tmp[i];
    taming::psi1_apply(out.z, col, params.delta, tmp);
    for (int i = 0; i < d; ++i) out.b[i * m + j] = tmp[i];
  }
  if (active) {
    taming::psi(out.z, params.delta, tmp);
    for (int i = 0; i < d; ++i) out.y_s[i] += tmp[i];
  }
  return out;
}

SitemDefects sitem_defects_at(const models::SdeModel& model,
                              const taming::TamingParams& params,
                              const brownian::IncrementGrid& fine,
                              int coarse_level, std::int64_t fine_index) {
  if (coarse_level < 0 || coarse_level > fine.level)
    fail(ErrorCode::InvalidArgument,
         "sitem_defects_at: coarse_level must be in [0, fine.level]");
  if (fine_index < 0 || fine_index >= fine.steps())
    fail(ErrorCode::InvalidArgument, "sitem_defects_at: fine_index out of range");
  int by = fine.level - coarse_level;
  brownian::IncrementGrid coarse = brownian::coarsen(fine, by);
  Trajectory y = sitem_trajectory(model, coarse, params);
  std::int64_t k = fine_index >> by;
  std::vector<double> w = brownian::brownian_values(fine);
  int m = fine.noise_dim;
  Vec dw(m);
  std::int64_t base = (k << by) * m;
  for (int j = 0; j < m; ++j) dw[j] = w[fine_index * m + j] - w[base + j];
  double dt = double(fine_index - (k << by)) * fine.h();
  bool active = (y.stop_index < 0 || k < y.stop_index) && y.diverged_at < 0;
  return sitem_defects(model, params, y.at(k), active, dt, dw);
}

}  // namespace sdekit::schemes
