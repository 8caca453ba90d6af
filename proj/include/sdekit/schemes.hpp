#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdekit/brownian.hpp"
#include "sdekit/models.hpp"
#include "sdekit/taming.hpp"

namespace sdekit::schemes {

enum class SchemeKind { Em, TamedEm, Sitem, LvMilstein };

SchemeKind scheme_from_name(const std::string& name);
std::string scheme_name(SchemeKind kind);

struct SchemeParams {
  taming::TamingParams taming;  /* sitem / tamed_em */
  double lv_gamma = 2.0;        /* lv_milstein pivot margin, > 1 */
};

struct Trajectory {
  int dim = 0;
  std::int64_t stride = 1;
  /* record r holds the state at grid index r * stride */
  std::vector<double> states;
  std::int64_t stop_index = -1;   /* sitem threshold crossing, -1 = never */
  std::int64_t diverged_at = -1;  /* first non-finite grid index, -1 = none */

  std::int64_t num_records() const {
    return static_cast<std::int64_t>(states.size()) / dim;
  }
  std::span<const double> at(std::int64_t rec) const {
    return {states.data() + rec * dim, static_cast<std::size_t>(dim)};
  }
};

/* exp(sqrt(|ln h|)); requires h < 1. */
double sitem_threshold(double h);

Trajectory em_trajectory(const models::SdeModel& model,
                         const brownian::IncrementGrid& grid,
                         std::int64_t stride = 1);

Trajectory tamed_em_trajectory(const models::SdeModel& model,
                               const brownian::IncrementGrid& grid,
                               const taming::TamingParams& params,
                               std::int64_t stride = 1);

/* Increment-tamed Euler with threshold stopping: the update
 *   Y + 1{|Y| < exp(sqrt(|ln h|))} psi(f(Y) h + g(Y) dW)
 * freezes the path once |Y| reaches the threshold. */
Trajectory sitem_trajectory(const models::SdeModel& model,
                            const brownian::IncrementGrid& grid,
                            const taming::TamingParams& params,
                            std::int64_t stride = 1);

struct LvStepGuard {
  double gamma = 2.0;
  double h_max = 0.0;
};

/* h_max = min_i 1 / (gamma (b_i - sum_j sigma_ij^2 / 2)^+) capped at the
 * horizon, with 1/0 read as infinity. Requires gamma > 1. */
LvStepGuard lv_step_guard(const models::LvCoefficients& coeffs, double gamma,
                          double horizon);

/* Linear-implicit Milstein step for Lotka-Volterra, componentwise
 *   Y_i <- Y_i (1 + S_i + S_i^2/2) / Q_i,  S_i = sum_j sigma_ij dW_j,
 *   Q_i = 1 - b_i h + h sum_j A_ij Y_j + h sum_j sigma_ij^2 / 2.
 * The numerator factor equals (1+S_i)^2/2 + 1/2 > 0, so positivity holds
 * exactly whenever h satisfies the step guard. */
Trajectory lv_milstein_trajectory(const models::SdeModel& model,
                                  const brownian::IncrementGrid& grid,
                                  double gamma, std::int64_t stride = 1);

/* Dispatch on kind; lv_milstein takes its pivot margin from params. */
Trajectory run_on_grid(const models::SdeModel& model, SchemeKind kind,
                       const SchemeParams& params,
                       const brownian::IncrementGrid& grid,
                       std::int64_t stride = 1);

/* Long-horizon runner: n_steps of size h with increments drawn on the fly
 * from the (seed, path_id) stream; grids are never materialized. */
Trajectory run_streaming(const models::SdeModel& model, SchemeKind kind,
                         const SchemeParams& params, std::uint64_t seed,
                         std::uint64_t path_id, double h,
                         std::int64_t n_steps, std::int64_t record_stride);

/* Continuous-interpolant coefficients of the stopped increment-tamed scheme
 * on one step, at in-step offset dt with Brownian displacement dw:
 *   Z   = f(y_n) dt + g(y_n) dw
 *   a   = psi1(Z) f(y_n) + (1/2) sum_j psi2(Z)(g(y_n) e_j, g(y_n) e_j)
 *   b   = psi1(Z) g(y_n)   (columnwise)
 *   y_s = y_n + 1{active} psi(Z)
 * At dt = 0, dw = 0 this reduces to a = f(y_n), b = g(y_n), y_s = y_n. */
struct SitemDefects {
  Vec z;
  Vec a;
  Vec b;  /* d x m row-major */
  Vec y_s;
};

SitemDefects sitem_defects(const models::SdeModel& model,
                           const taming::TamingParams& params,
                           std::span<const double> y_n, bool active, double dt,
                           std::span<const double> dw);

/* Grid-level wrapper: evaluates the defect coefficients at fine grid index
 * `fine_index` of `fine`, for the coarse trajectory obtained by running the
 * scheme on coarsen(fine, fine.level - coarse_level). */
SitemDefects sitem_defects_at(const models::SdeModel& model,
                              const taming::TamingParams& params,
                              const brownian::IncrementGrid& fine,
                              int coarse_level, std::int64_t fine_index);

}  // namespace sdekit::schemes
