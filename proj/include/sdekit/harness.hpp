#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sdekit/brownian.hpp"
#include "sdekit/models.hpp"
#include "sdekit/schemes.hpp"

namespace sdekit::harness {

/* Runs body(p) for p in [0, paths); workers own contiguous path ranges, so
 * any thread count visits the same paths. Callers that aggregate must write
 * into per-path slots and reduce in index order to stay thread-invariant. */
void parallel_paths(std::int64_t paths, int threads,
                    const std::function<void(std::int64_t)>& body);

struct ErrorSample {
  std::int64_t path_id = 0;
  double sup_error = 0.0; /* max over coarse grid points of |Y_ref - Y| */
  bool diverged = false;
};

struct LevelRun {
  int level = 0;
  double h = 0.0;
  std::vector<ErrorSample> samples; /* one per path, in path order */
};

/* (mean of sup_error^r over non-diverged samples)^(1/r); zero usable
 * samples yields 0 with *used == 0. */
double lr_norm(std::span<const ErrorSample> samples, double r,
               std::int64_t* used = nullptr, std::int64_t* diverged = nullptr);

/* Coupled-path errors at one level: per path, the scheme runs on the
 * ref_level grid (recorded at the coarse grid points) and on its coarsening,
 * and the sup distance over coarse grid points is taken. ref_level == level
 * degenerates to comparing a run against itself (exactly zero). */
LevelRun error_samples_at_level(const models::SdeModel& model,
                                schemes::SchemeKind kind,
                                const schemes::SchemeParams& params,
                                std::uint64_t seed, std::int64_t paths,
                                int level, int ref_level, double horizon,
                                int threads);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; /* max |log2 error - fit| */
};

/* OLS of log2(error) against log2(h); needs >= 2 points, all positive. */
RateFit fit_rate(std::span<const double> h, std::span<const double> errors);

struct LevelError {
  int level = 0;
  double h = 0.0;
  double error = 0.0; /* L^r pathwise-uniform error */
  std::int64_t paths_used = 0;
  std::int64_t diverged = 0;
};

struct RateReport {
  std::string scheme;
  std::string model;
  double r_order = 2.0;
  std::int64_t paths = 0;
  std::vector<LevelError> levels;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

struct StrongErrorSpec {
  schemes::SchemeKind scheme = schemes::SchemeKind::Sitem;
  schemes::SchemeParams params;
  std::uint64_t seed = 1;
  std::int64_t paths = 500;
  std::vector<int> levels;
  int ref_level = 12;
  double horizon = 1.0;
  double r_order = 2.0;
  int threads = 1;
};

/* Reference = the same scheme at ref_level on the shared Brownian path;
 * requires ref_level > max(levels) + 1. Levels where every path diverged
 * are excluded from the fit; fewer than 2 usable levels is an error. */
RateReport strong_error(const models::SdeModel& model,
                        const StrongErrorSpec& spec);

/* Exact geometric Brownian motion x0 exp((mu - sigma^2/2) t + sigma W_t)
 * at every grid point, from the grid's partial sums; scalar noise only. */
std::vector<double> exact_reference_gbm(double mu, double sigma, double x0,
                                        const brownian::IncrementGrid& grid);

/* Harness calibration: EM against the exact GBM solution on the same path,
 * one grid per level (spec.ref_level is ignored). */
RateReport gbm_calibration(double mu, double sigma, double x0,
                           const StrongErrorSpec& spec);

struct MomentSeries {
  double h = 0.0;
  std::vector<double> times;
  std::vector<double> orders;
  std::vector<double> moments;     /* row-major [time][order] */
  std::vector<std::int64_t> alive; /* non-diverged paths per time */
  double mean_square_time_average = 0.0; /* (1/T) int_0^T E|Y_s|^2 ds */
  std::vector<double> terminal_abs; /* |Y_T| per path, NaN when diverged */
};

/* E|Y_t|^p curves at record times k * record_dt; h must divide record_dt
 * and the horizon. */
MomentSeries longtime_moments(const models::SdeModel& model,
                              schemes::SchemeKind kind,
                              const schemes::SchemeParams& params,
                              std::uint64_t seed, std::int64_t paths, double h,
                              double horizon, std::span<const double> orders,
                              double record_dt, int threads);

/* |Y_T| per path, in path order; diverged paths carry NaN. */
std::vector<double> terminal_abs(const models::SdeModel& model,
                                 schemes::SchemeKind kind,
                                 const schemes::SchemeParams& params,
                                 std::uint64_t seed, std::int64_t paths,
                                 double h, double horizon, int threads);

/* Median of the finite entries. */
double median(std::vector<double> values);

struct DensityReport {
  std::vector<double> bin_centers;
  std::vector<double> empirical; /* histogram density of x1 */
  std::vector<double> analytic;  /* quadrature-normalized marginal */
  double l1_distance = 0.0;
  double analytic_mass = 0.0; /* trapezoid integral of the normalized
                                 marginal on its own grid, ~1 */
  std::int64_t samples = 0;
};

/* Histogram of the first coordinate over post-burn-in samples (one per
 * record_dt = 1 time unit) against the model's analytic stationary marginal
 * on [-6, 6]; requires model.stationary_log_joint. */
DensityReport stationary_density_check(const models::SdeModel& model,
                                       schemes::SchemeKind kind,
                                       const schemes::SchemeParams& params,
                                       std::uint64_t seed, std::int64_t paths,
                                       double h, double t_burn,
                                       double t_sample, int bins, int threads);

}  // namespace sdekit::harness
