#include "sdekit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace sdekit::harness {

namespace {

/* n with n * h == span (up to rounding); span = n * h is required exactly
 * in the dyadic cases and to 1e-9 relative otherwise. */
std::int64_t checked_steps(double span, double h, const std::string& what) {
  if (!(h > 0.0) || !(span > 0.0))
    fail(ErrorCode::InvalidArgument, what + ": need a positive stepsize and span");
  auto n = static_cast<std::int64_t>(std::llround(span / h));
  if (n < 1 || std::fabs(static_cast<double>(n) * h - span) > 1e-9 * span)
    fail(ErrorCode::InvalidArgument,
         what + ": stepsize " + std::to_string(h) + " does not divide " +
             std::to_string(span));
  return n;
}

double sup_record_distance(const schemes::Trajectory& a,
                           const schemes::Trajectory& b) {
  double sup = 0.0;
  for (std::int64_t k = 0; k < a.num_records(); ++k) {
    std::span<const double> ya = a.at(k), yb = b.at(k);
    double s2 = 0.0;
    for (std::size_t i = 0; i < ya.size(); ++i) {
      double d = ya[i] - yb[i];
      s2 += d * d;
    }
    sup = std::max(sup, std::sqrt(s2));
  }
  return sup;
}

void append_usable(const LevelError& le, std::vector<double>& hs,
                   std::vector<double>& errs) {
  if (le.paths_used > 0 && le.error > 0.0) {
    hs.push_back(le.h);
    errs.push_back(le.error);
  }
}

void finish_rate_report(RateReport& rep, const std::vector<double>& hs,
                        const std::vector<double>& errs) {
  if (hs.size() < 2)
    fail(ErrorCode::Divergence,
         "strong_error: rate undefined, fewer than 2 usable levels");
  RateFit fit = fit_rate(hs, errs);
  rep.slope = fit.slope;
  rep.intercept = fit.intercept;
  rep.residual = fit.residual;
}

void validate_levels(const std::vector<int>& levels, const std::string& what) {
  if (levels.empty()) fail(ErrorCode::InvalidArgument, what + ": no levels given");
  for (int level : levels)
    if (level < 0 || level > brownian::kMaxLevel)
      fail(ErrorCode::InvalidArgument, what + ": level out of range");
}

}  // namespace

void parallel_paths(std::int64_t paths, int threads,
                    const std::function<void(std::int64_t)>& body) {
  if (threads < 1)
    fail(ErrorCode::InvalidArgument, "parallel_paths: threads must be >= 1");
  if (paths <= 0) return;
  int workers = static_cast<int>(std::min<std::int64_t>(threads, paths));
  if (workers == 1) {
    for (std::int64_t p = 0; p < paths; ++p) body(p);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr first;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    std::int64_t lo = paths * w / workers;
    std::int64_t hi = paths * (w + 1) / workers;
    pool.emplace_back([&body, &mu, &first, lo, hi]() {
      try {
        for (std::int64_t p = lo; p < hi; ++p) body(p);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

double lr_norm(std::span<const ErrorSample> samples, double r,
               std::int64_t* used, std::int64_t* diverged) {
  if (!(r > 0.0))
    fail(ErrorCode::InvalidArgument, "lr_norm: r must be positive");
  std::int64_t u = 0, d = 0;
  double acc = 0.0;
  for (const ErrorSample& s : samples) {
    if (s.diverged) {
      ++d;
      continue;
    }
    acc += std::pow(s.sup_error, r);
    ++u;
  }
  if (used) *used = u;
  if (diverged) *diverged = d;
  return u > 0 ? std::pow(acc / static_cast<double>(u), 1.0 / r) : 0.0;
}

LevelRun error_samples_at_level(const models::SdeModel& model,
                                schemes::SchemeKind kind,
                                const schemes::SchemeParams& params,
                                std::uint64_t seed, std::int64_t paths,
                                int level, int ref_level, double horizon,
                                int threads) {
  if (level < 0 || ref_level < level || ref_level > brownian::kMaxLevel)
    fail(ErrorCode::InvalidArgument,
         "error_samples_at_level: need 0 <= level <= ref_level <= " +
             std::to_string(brownian::kMaxLevel));
  if (paths < 1)
    fail(ErrorCode::InvalidArgument, "error_samples_at_level: paths must be >= 1");
  LevelRun run;
  run.level = level;
  run.h = horizon / static_cast<double>(std::int64_t{1} << level);
  run.samples.resize(paths);
  int by = ref_level - level;
  std::int64_t ref_stride = std::int64_t{1} << by;
  parallel_paths(paths, threads, [&](std::int64_t p) {
    ErrorSample& out = run.samples[p];
    out.path_id = p;
    brownian::IncrementGrid fine =
        brownian::generate(seed, p, model.noise_dim, horizon, ref_level);
    schemes::Trajectory ref =
        schemes::run_on_grid(model, kind, params, fine, ref_stride);
    schemes::Trajectory coarse = schemes::run_on_grid(
        model, kind, params, brownian::coarsen(fine, by), 1);
    if (ref.diverged_at >= 0 || coarse.diverged_at >= 0) {
      out.diverged = true;
      return;
    }
    double sup = sup_record_distance(coarse, ref);
    if (!std::isfinite(sup)) {
      out.diverged = true;
      return;
    }
    out.sup_error = sup;
  });
  return run;
}

RateFit fit_rate(std::span<const double> h, std::span<const double> errors) {
  if (h.size() != errors.size() || h.size() < 2)
    fail(ErrorCode::InvalidArgument, "fit_rate: need >= 2 (h, error) pairs");
  std::size_t n = h.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(errors[i] > 0.0))
      fail(ErrorCode::InvalidArgument,
           "fit_rate: stepsizes and errors must be positive");
    x[i] = std::log2(h[i]);
    y[i] = std::log2(errors[i]);
  }
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= static_cast<double>(n);
  ym /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0)
    fail(ErrorCode::InvalidArgument, "fit_rate: stepsizes must differ");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  for (std::size_t i = 0; i < n; ++i)
    fit.residual = std::max(
        fit.residual, std::fabs(y[i] - (fit.intercept + fit.slope * x[i])));
  return fit;
}

RateReport strong_error(const models::SdeModel& model,
                        const StrongErrorSpec& spec) {
  validate_levels(spec.levels, "strong_error");
  int max_level = *std::max_element(spec.levels.begin(), spec.levels.end());
  if (spec.ref_level <= max_level + 1 || spec.ref_level > brownian::kMaxLevel)
    fail(ErrorCode::InvalidArgument,
         "strong_error: ref_level must exceed max(levels) + 1");
  if (!(spec.r_order > 0.0))
    fail(ErrorCode::InvalidArgument, "strong_error: r must be positive");
  RateReport rep;
  rep.scheme = schemes::scheme_name(spec.scheme);
  rep.model = model.name;
  rep.r_order = spec.r_order;
  rep.paths = spec.paths;
  std::vector<double> hs, errs;
  for (int level : spec.levels) {
    LevelRun run = error_samples_at_level(model, spec.scheme, spec.params,
                                          spec.seed, spec.paths, level,
                                          spec.ref_level, spec.horizon,
                                          spec.threads);
    LevelError le;
    le.level = level;
    le.h = run.h;
    le.error = lr_norm(run.samples, spec.r_order, &le.paths_used, &le.diverged);
    rep.levels.push_back(le);
    append_usable(le, hs, errs);
  }
  finish_rate_report(rep, hs, errs);
  return rep;
}

std::vector<double> exact_reference_gbm(double mu, double sigma, double x0,
                                        const brownian::IncrementGrid& grid) {
  if (grid.noise_dim != 1)
    fail(ErrorCode::InvalidArgument, "exact_reference_gbm: scalar noise only");
  std::vector<double> w = brownian::brownian_values(grid);
  std::int64_t n = grid.steps();
  double h = grid.h();
  double a = mu - 0.5 * sigma * sigma;
  std::vector<double> out(n + 1);
  for (std::int64_t k = 0; k <= n; ++k)
    out[k] = x0 * std::exp(a * (h * static_cast<double>(k)) + sigma * w[k]);
  return out;
}

RateReport gbm_calibration(double mu, double sigma, double x0,
                           const StrongErrorSpec& spec) {
  validate_levels(spec.levels, "gbm_calibration");
  if (!(spec.r_order > 0.0))
    fail(ErrorCode::InvalidArgument, "gbm_calibration: r must be positive");
  if (spec.paths < 1)
    fail(ErrorCode::InvalidArgument, "gbm_calibration: paths must be >= 1");
  models::SdeModel mdl = models::gbm(mu, sigma, x0);
  RateReport rep;
  rep.scheme = schemes::scheme_name(schemes::SchemeKind::Em);
  rep.model = mdl.name;
  rep.r_order = spec.r_order;
  rep.paths = spec.paths;
  std::vector<double> hs, errs;
  for (int level : spec.levels) {
    LevelRun run;
    run.level = level;
    run.h = spec.horizon / static_cast<double>(std::int64_t{1} << level);
    run.samples.resize(spec.paths);
    parallel_paths(spec.paths, spec.threads, [&](std::int64_t p) {
      ErrorSample& out = run.samples[p];
      out.path_id = p;
      brownian::IncrementGrid grid =
          brownian::generate(spec.seed, p, 1, spec.horizon, level);
      schemes::Trajectory em = schemes::em_trajectory(mdl, grid);
      if (em.diverged_at >= 0) {
        out.diverged = true;
        return;
      }
      std::vector<double> exact = exact_reference_gbm(mu, sigma, x0, grid);
      double sup = 0.0;
      for (std::int64_t k = 0; k < em.num_records(); ++k)
        sup = std::max(sup, std::fabs(em.states[k] - exact[k]));
      if (!std::isfinite(sup)) {
        out.diverged = true;
        return;
      }
      out.sup_error = sup;
    });
    LevelError le;
    le.level = level;
    le.h = run.h;
    le.error = lr_norm(run.samples, spec.r_order, &le.paths_used, &le.diverged);
    rep.levels.push_back(le);
    append_usable(le, hs, errs);
  }
  finish_rate_report(rep, hs, errs);
  return rep;
}

MomentSeries longtime_moments(const models::SdeModel& model,
                              schemes::SchemeKind kind,
                              const schemes::SchemeParams& params,
                              std::uint64_t seed, std::int64_t paths, double h,
                              double horizon, std::span<const double> orders,
                              double record_dt, int threads) {
  std::int64_t n_steps = checked_steps(horizon, h, "longtime_moments");
  std::int64_t rec_every = checked_steps(record_dt, h, "longtime_moments");
  if (n_steps % rec_every != 0)
    fail(ErrorCode::InvalidArgument,
         "longtime_moments: record_dt must divide the horizon");
  if (orders.empty())
    fail(ErrorCode::InvalidArgument, "longtime_moments: no moment orders given");
  if (paths < 1)
    fail(ErrorCode::InvalidArgument, "longtime_moments: paths must be >= 1");
  std::int64_t n_rec = n_steps / rec_every + 1;
  std::size_t n_ord = orders.size();

  MomentSeries out;
  out.h = h;
  out.orders.assign(orders.begin(), orders.end());
  out.times.resize(n_rec);
  for (std::int64_t rt = 0; rt < n_rec; ++rt)
    out.times[rt] = record_dt * static_cast<double>(rt);

  std::vector<double> norms(static_cast<std::size_t>(paths) * n_rec);
  parallel_paths(paths, threads, [&](std::int64_t p) {
    schemes::Trajectory traj =
        schemes::run_streaming(model, kind, params, seed, p, h, n_steps,
                               rec_every);
    for (std::int64_t rt = 0; rt < n_rec; ++rt) {
      std::span<const double> y = traj.at(rt);
      norms[static_cast<std::size_t>(p) * n_rec + rt] = std::sqrt(dot(y, y));
    }
  });

  out.alive.assign(n_rec, 0);
  out.moments.assign(static_cast<std::size_t>(n_rec) * n_ord, 0.0);
  std::vector<double> m2(n_rec, 0.0);
  for (std::int64_t p = 0; p < paths; ++p) {
    for (std::int64_t rt = 0; rt < n_rec; ++rt) {
      double v = norms[static_cast<std::size_t>(p) * n_rec + rt];
      if (!std::isfinite(v)) continue;
      ++out.alive[rt];
      m2[rt] += v * v;
      for (std::size_t oi = 0; oi < n_ord; ++oi)
        out.moments[static_cast<std::size_t>(rt) * n_ord + oi] +=
            std::pow(v, orders[oi]);
    }
  }
  for (std::int64_t rt = 0; rt < n_rec; ++rt) {
    double denom = static_cast<double>(out.alive[rt]);
    for (std::size_t oi = 0; oi < n_ord; ++oi) {
      double& cell = out.moments[static_cast<std::size_t>(rt) * n_ord + oi];
      cell = out.alive[rt] > 0 ? cell / denom
                               : std::numeric_limits<double>::quiet_NaN();
    }
    m2[rt] = out.alive[rt] > 0 ? m2[rt] / denom
                               : std::numeric_limits<double>::quiet_NaN();
  }
  double acc = 0.0;
  for (std::int64_t rt = 0; rt + 1 < n_rec; ++rt) acc += m2[rt];
  out.mean_square_time_average = acc * record_dt / horizon;
  out.terminal_abs.resize(paths);
  for (std::int64_t p = 0; p < paths; ++p)
    out.terminal_abs[p] = norms[static_cast<std::size_t>(p) * n_rec + n_rec - 1];
  return out;
}

std::vector<double> terminal_abs(const models::SdeModel& model,
                                 schemes::SchemeKind kind,
                                 const schemes::SchemeParams& params,
                                 std::uint64_t seed, std::int64_t paths,
                                 double h, double horizon, int threads) {
  std::int64_t n_steps = checked_steps(horizon, h, "terminal_abs");
  if (paths < 1)
    fail(ErrorCode::InvalidArgument, "terminal_abs: paths must be >= 1");
  std::vector<double> out(paths);
  parallel_paths(paths, threads, [&](std::int64_t p) {
    schemes::Trajectory traj =
        schemes::run_streaming(model, kind, params, seed, p, h, n_steps,
                               n_steps);
    std::span<const double> y = traj.at(1);
    double v = std::sqrt(dot(y, y));
    out[p] = std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  });
  return out;
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty())
    fail(ErrorCode::InvalidArgument, "median: no finite values");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

constexpr double kDensityHalfWidth = 6.0;
constexpr int kQuadNodes = 4096;

/* trapezoid integral of samples on a uniform grid with spacing dx */
double trapezoid(std::span<const double> samples, double dx) {
  double acc = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) acc += samples[i];
  return acc * dx;
}

/* unnormalized marginal of exp(log_joint) over x2 in [-L, L] */
double marginal_at(const std::function<double(double, double)>& log_joint,
                   double x1) {
  double dx = 2.0 * kDensityHalfWidth / (kQuadNodes - 1);
  double acc = 0.0;
  for (int j = 0; j < kQuadNodes; ++j) {
    double x2 = -kDensityHalfWidth + dx * j;
    double v = std::exp(log_joint(x1, x2));
    acc += (j == 0 || j == kQuadNodes - 1) ? 0.5 * v : v;
  }
  return acc * dx;
}

}  // namespace

DensityReport stationary_density_check(const models::SdeModel& model,
                                       schemes::SchemeKind kind,
                                       const schemes::SchemeParams& params,
                                       std::uint64_t seed, std::int64_t paths,
                                       double h, double t_burn,
                                       double t_sample, int bins,
                                       int threads) {
  if (!model.stationary_log_joint || model.dim != 2)
    fail(ErrorCode::Unsupported,
         "stationary_density_check: model '" + model.name +
             "' carries no analytic stationary density");
  if (bins < 2)
    fail(ErrorCode::InvalidArgument, "stationary_density_check: bins must be >= 2");
  if (paths < 1)
    fail(ErrorCode::InvalidArgument, "stationary_density_check: paths must be >= 1");
  if (!(t_burn >= 0.0) || !(t_sample >= 1.0))
    fail(ErrorCode::InvalidArgument,
         "stationary_density_check: need t_burn >= 0 and t_sample >= 1");
  auto burn_units = static_cast<std::int64_t>(std::llround(t_burn));
  auto sample_units = static_cast<std::int64_t>(std::llround(t_sample));
  if (std::fabs(t_burn - static_cast<double>(burn_units)) > 1e-9 ||
      std::fabs(t_sample - static_cast<double>(sample_units)) > 1e-9)
    fail(ErrorCode::InvalidArgument,
         "stationary_density_check: t_burn and t_sample must be whole time "
         "units (subsampling period is 1)");
  std::int64_t rec_every = checked_steps(1.0, h, "stationary_density_check");
  std::int64_t n_steps = (burn_units + sample_units) * rec_every;
  std::int64_t n_rec = burn_units + sample_units + 1;

  const double width = 2.0 * kDensityHalfWidth / bins;
  std::vector<std::int64_t> counts(bins, 0);
  std::int64_t total = 0;
  std::mutex mu;
  parallel_paths(paths, threads, [&](std::int64_t p) {
    std::vector<std::int64_t> local(bins, 0);
    std::int64_t local_total = 0;
    schemes::Trajectory traj =
        schemes::run_streaming(model, kind, params, seed, p, h, n_steps,
                               rec_every);
    for (std::int64_t rt = burn_units + 1; rt < n_rec; ++rt) {
      double x1 = traj.at(rt)[0];
      ++local_total;
      if (std::isfinite(x1) && std::fabs(x1) < kDensityHalfWidth) {
        auto b = static_cast<int>((x1 + kDensityHalfWidth) / width);
        if (b >= bins) b = bins - 1;
        ++local[b];
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    total += local_total;
    for (int b = 0; b < bins; ++b) counts[b] += local[b];
  });

  DensityReport rep;
  rep.samples = total;
  rep.bin_centers.resize(bins);
  rep.empirical.resize(bins);
  rep.analytic.resize(bins);
  for (int b = 0; b < bins; ++b) {
    rep.bin_centers[b] = -kDensityHalfWidth + width * (b + 0.5);
    rep.empirical[b] =
        static_cast<double>(counts[b]) / (static_cast<double>(total) * width);
  }

  double dx = 2.0 * kDensityHalfWidth / (kQuadNodes - 1);
  std::vector<double> marg(kQuadNodes);
  for (int i = 0; i < kQuadNodes; ++i)
    marg[i] = marginal_at(model.stationary_log_joint,
                          -kDensityHalfWidth + dx * i);
  double z = trapezoid(marg, dx);
  if (!(z > 0.0) || !std::isfinite(z))
    fail(ErrorCode::Internal, "stationary_density_check: bad normalizer");
  for (double& v : marg) v /= z;
  rep.analytic_mass = trapezoid(marg, dx);

  double l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    rep.analytic[b] =
        marginal_at(model.stationary_log_joint, rep.bin_centers[b]) / z;
    l1 += std::fabs(rep.empirical[b] - rep.analytic[b]) * width;
  }
  rep.l1_distance = l1;
  return rep;
}

}  // namespace sdekit::harness
