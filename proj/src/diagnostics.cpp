#include "sdekit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdekit/harness.hpp"

namespace sdekit::diagnostics {

void validate(const EtaParams& params) {
  if (!(params.z >= 2.0))
    fail(ErrorCode::InvalidArgument, "eta: z must be >= 2");
  if (!(params.epsilon > 0.0))
    fail(ErrorCode::InvalidArgument, "eta: epsilon must be positive");
}

namespace {

double eta_value(std::span<const double> x, std::span<const double> y,
                 const models::SdeModel& model, const EtaParams& params,
                 Vec& fx, Vec& fy, Vec& gx, Vec& gy) {
  double n2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    n2 += d * d;
  }
  if (n2 == 0.0) return 0.0;
  model.drift(x, fx);
  model.drift(y, fy);
  model.diffusion(x, gx);
  model.diffusion(y, gy);
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    inner += (x[i] - y[i]) * (fx[i] - fy[i]);
  double gdiff2 = 0.0;
  for (std::size_t i = 0; i < gx.size(); ++i) {
    double d = gx[i] - gy[i];
    gdiff2 += d * d;
  }
  double bracket =
      inner + 0.5 * (params.z - 1.0) * (1.0 + params.epsilon) * gdiff2;
  return bracket > 0.0 ? params.z * bracket / n2 : 0.0;
}

}  // namespace

EtaPath eta_path(const schemes::Trajectory& x, const schemes::Trajectory& y,
                 const models::SdeModel& model, const EtaParams& params,
                 double h, std::int64_t stop_index) {
  validate(params);
  if (x.num_records() != y.num_records() || x.dim != y.dim ||
      x.dim != model.dim)
    fail(ErrorCode::InvalidArgument,
         "eta_path: trajectories must share a grid and the model dimension");
  if (!(h > 0.0)) fail(ErrorCode::InvalidArgument, "eta_path: h must be positive");
  std::int64_t n = x.num_records();
  EtaPath out;
  out.values.assign(n, 0.0);
  out.cumulative.assign(n, 0.0);
  Vec fx(model.dim), fy(model.dim);
  Vec gx(static_cast<std::size_t>(model.dim) * model.noise_dim), gy(gx.size());
  for (std::int64_t r = 0; r < n; ++r) {
    if (stop_index >= 0 && r >= stop_index) break;
    out.values[r] = eta_value(x.at(r), y.at(r), model, params, fx, fy, gx, gy);
  }
  for (std::int64_t r = 1; r < n; ++r)
    out.cumulative[r] = out.cumulative[r - 1] + out.values[r - 1] * h;
  return out;
}

double exp_integrability_statistic(const schemes::Trajectory& traj,
                                   const models::SdeModel& model, double h) {
  if (!model.lyapunov_u0)
    fail(ErrorCode::Unsupported,
         "exp_integrability_statistic: model '" + model.name +
             "' carries no Lyapunov data");
  if (!(h > 0.0))
    fail(ErrorCode::InvalidArgument,
         "exp_integrability_statistic: h must be positive");
  if (traj.dim != model.dim)
    fail(ErrorCode::InvalidArgument,
         "exp_integrability_statistic: dimension mismatch");
  std::int64_t n = traj.num_records();
  double best = -std::numeric_limits<double>::infinity();
  double u1_integral = 0.0;
  for (std::int64_t r = 0; r < n; ++r) {
    double t = h * static_cast<double>(r);
    double arg = model.lyapunov_u0(traj.at(r)) * std::exp(-model.alpha * t) +
                 u1_integral;
    best = std::max(best, arg);
    bool before_stop = traj.stop_index < 0 || r < traj.stop_index;
    if (model.lyapunov_u1 && before_stop)
      u1_integral +=
          model.lyapunov_u1(traj.at(r)) * std::exp(-model.alpha * t) * h;
  }
  return std::exp(best);
}

namespace {

struct PathDefects {
  std::vector<double> drift4; /* |f(Y_floor) - a|^p per fine interval */
  std::vector<double> diff4;  /* ||g(Y_s) - b||^p per fine interval */
  double eta_integral = 0.0;  /* int (1/2) eta_z ds over [0, tau] */
  double sup = 0.0;           /* sup over fine points <= tau of |X - Y_s| */
};

}  // namespace

DefectReport defect_integrals(const models::SdeModel& model,
                              const DefectParams& params) {
  taming::validate(params.taming);
  validate(params.eta);
  if (params.coarse_levels.empty())
    fail(ErrorCode::InvalidArgument, "defect_integrals: no coarse levels given");
  if (params.fine_level > brownian::kMaxLevel)
    fail(ErrorCode::InvalidArgument, "defect_integrals: fine_level too large");
  for (int level : params.coarse_levels)
    if (level < 0 || level >= params.fine_level)
      fail(ErrorCode::InvalidArgument,
           "defect_integrals: coarse levels must lie in [0, fine_level)");
  if (params.paths < 1)
    fail(ErrorCode::InvalidArgument, "defect_integrals: paths must be >= 1");
  if (!(params.p >= 2.0) || !(params.q > 0.0))
    fail(ErrorCode::InvalidArgument, "defect_integrals: need p >= 2 and q > 0");

  DefectReport rep;
  rep.v = 1.0 / (1.0 / params.p + 1.0 / params.q);
  const std::int64_t n_fine = std::int64_t{1} << params.fine_level;
  const double h_f = params.horizon / static_cast<double>(n_fine);
  const int d = model.dim, m = model.noise_dim;
  schemes::SchemeParams run_params;
  run_params.taming = params.taming;

  for (int level : params.coarse_levels) {
    const int by = params.fine_level - level;
    const double h_c = params.horizon / static_cast<double>(std::int64_t{1} << level);
    std::vector<PathDefects> per_path(params.paths);
    harness::parallel_paths(params.paths, params.threads, [&](std::int64_t p) {
      PathDefects& acc = per_path[p];
      acc.drift4.assign(n_fine, 0.0);
      acc.diff4.assign(n_fine, 0.0);
      brownian::IncrementGrid fine =
          brownian::generate(params.seed, p, m, params.horizon,
                             params.fine_level);
      std::vector<double> w = brownian::brownian_values(fine);
      schemes::Trajectory xref =
          schemes::sitem_trajectory(model, fine, params.taming);
      schemes::Trajectory y = schemes::sitem_trajectory(
          model, brownian::coarsen(fine, by), params.taming);
      std::int64_t tau = n_fine;
      if (y.stop_index >= 0) tau = std::min(tau, y.stop_index << by);
      if (xref.stop_index >= 0) tau = std::min(tau, xref.stop_index);

      Vec f_k(d), g_s(static_cast<std::size_t>(d) * m), dw(m);
      Vec fx(d), fys(d), gx(g_s.size()), gys(g_s.size());
      for (std::int64_t i = 0; i < tau; ++i) {
        std::int64_t k = i >> by;
        std::int64_t base = k << by;
        double dt = h_f * static_cast<double>(i - base);
        for (int j = 0; j < m; ++j)
          dw[j] = w[i * m + j] - w[base * m + j];
        schemes::SitemDefects defects = schemes::sitem_defects(
            model, params.taming, y.at(k), true, dt, dw);
        model.drift(y.at(k), f_k);
        double drift_norm2 = 0.0;
        for (int c = 0; c < d; ++c) {
          double dd = f_k[c] - defects.a[c];
          drift_norm2 += dd * dd;
        }
        model.diffusion(defects.y_s, g_s);
        double diff_norm2 = 0.0;
        for (std::size_t c = 0; c < g_s.size(); ++c) {
          double dd = g_s[c] - defects.b[c];
          diff_norm2 += dd * dd;
        }
        acc.drift4[i] = std::pow(drift_norm2, 0.5 * params.p);
        acc.diff4[i] = std::pow(diff_norm2, 0.5 * params.p);

        double dist2 = 0.0;
        std::span<const double> xi = xref.at(i);
        for (int c = 0; c < d; ++c) {
          double dd = xi[c] - defects.y_s[c];
          dist2 += dd * dd;
        }
        acc.sup = std::max(acc.sup, std::sqrt(dist2));
        acc.eta_integral +=
            0.5 *
            eta_value(xi, defects.y_s, model, params.eta, fx, fys, gx, gys) *
            h_f;
      }
      if (tau == n_fine) {
        /* closing grid point: interpolant equals the final coarse state */
        std::span<const double> xi = xref.at(n_fine);
        std::span<const double> yk = y.at(n_fine >> by);
        double dist2 = 0.0;
        for (int c = 0; c < d; ++c) {
          double dd = xi[c] - yk[c];
          dist2 += dd * dd;
        }
        acc.sup = std::max(acc.sup, std::sqrt(dist2));
      }
    });

    DefectLevel lv;
    lv.level = level;
    lv.h = h_c;
    const auto paths = static_cast<double>(params.paths);
    double drift_acc = 0.0, diff_acc = 0.0;
    for (std::int64_t i = 0; i < n_fine; ++i) {
      double s_drift = 0.0, s_diff = 0.0;
      for (std::int64_t p = 0; p < params.paths; ++p) {
        s_drift += per_path[p].drift4[i];
        s_diff += per_path[p].diff4[i];
      }
      drift_acc += std::pow(s_drift / paths, 2.0 / params.p);
      diff_acc += std::pow(s_diff / paths, 2.0 / params.p);
    }
    lv.drift_defect = drift_acc * h_f;
    lv.diffusion_defect = diff_acc * h_f;

    double sup_acc = 0.0;
    for (std::int64_t p = 0; p < params.paths; ++p)
      sup_acc += std::pow(per_path[p].sup, rep.v);
    lv.lhs = std::pow(sup_acc / paths, 1.0 / rep.v);

    double peak = -std::numeric_limits<double>::infinity();
    for (std::int64_t p = 0; p < params.paths; ++p)
      peak = std::max(peak, params.q * per_path[p].eta_integral);
    double lse = 0.0;
    for (std::int64_t p = 0; p < params.paths; ++p)
      lse += std::exp(params.q * per_path[p].eta_integral - peak);
    lv.exp_weight_log = (peak + std::log(lse) - std::log(paths)) / params.q;

    lv.implied_constant =
        lv.lhs / std::sqrt(h_c * h_c + lv.drift_defect + lv.diffusion_defect);
    rep.levels.push_back(lv);
  }

  if (rep.levels.size() >= 2) {
    std::vector<double> hs, drifts, diffs;
    for (const DefectLevel& lv : rep.levels) {
      if (!(lv.drift_defect > 0.0) || !(lv.diffusion_defect > 0.0)) continue;
      hs.push_back(lv.h);
      drifts.push_back(lv.drift_defect);
      diffs.push_back(lv.diffusion_defect);
    }
    if (hs.size() >= 2) {
      rep.drift_slope = harness::fit_rate(hs, drifts).slope;
      rep.diffusion_slope = harness::fit_rate(hs, diffs).slope;
    }
  }
  return rep;
}

}  // namespace sdekit::diagnostics
