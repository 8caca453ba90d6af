#pragma once

#include <cstdint>
#include <vector>

#include "sdekit/brownian.hpp"
#include "sdekit/models.hpp"
#include "sdekit/schemes.hpp"
#include "sdekit/taming.hpp"

namespace sdekit::diagnostics {

struct EtaParams {
  double z = 2.0;
  double epsilon = 1.0;
};

/* z >= 2, epsilon > 0 */
void validate(const EtaParams& params);

struct EtaPath {
  std::vector<double> values;     /* eta at each record */
  std::vector<double> cumulative; /* left-endpoint integral up to each record */
};

/*
 * The monotonicity-excess weight between two trajectories on a shared grid:
 *   eta_r = z 1{r <= tau} [ <X-Y, f(X)-f(Y)> +
 *                           ((z-1)(1+eps)/2) ||g(X)-g(Y)||^2 ]^+ / |X-Y|^2
 * and 0 at coincident states. h is the record spacing; stop_index cuts the
 * indicator (-1 = never): records at and after it get value 0, since their
 * quadrature intervals lie beyond tau.
 */
EtaPath eta_path(const schemes::Trajectory& x, const schemes::Trajectory& y,
                 const models::SdeModel& model, const EtaParams& params,
                 double h, std::int64_t stop_index);

/*
 * max over records n of exp( U0(Y_n) e^{-alpha t_n}
 *                            + sum_{j < n ^ stop} U1(Y_j) e^{-alpha t_j} h ).
 * Requires the model's Lyapunov data; U1 absent means identically zero.
 */
double exp_integrability_statistic(const schemes::Trajectory& traj,
                                   const models::SdeModel& model, double h);

struct DefectParams {
  taming::TamingParams taming;
  EtaParams eta;
  double p = 4.0; /* defect norm exponent */
  double q = 4.0; /* exponential weight norm exponent */
  std::uint64_t seed = 1;
  std::int64_t paths = 200;
  std::vector<int> coarse_levels;
  int fine_level = 12;
  double horizon = 1.0;
  int threads = 1;
};

struct DefectLevel {
  int level = 0;
  double h = 0.0;
  double drift_defect = 0.0;     /* int ||f(Y_floor(s)) - a(s)||_{L^p}^2 ds */
  double diffusion_defect = 0.0; /* int ||g(Y_s) - b(s)||_{L^p}^2 ds */
  double exp_weight_log = 0.0;   /* log || exp(int eta_{z}/2) ||_{L^q} */
  double lhs = 0.0;              /* || sup_t |X - Y| ||_{L^v}, 1/v = 1/p + 1/q */
  double implied_constant = 0.0; /* lhs / sqrt(h^2 + drift + diffusion) */
};

struct DefectReport {
  std::vector<DefectLevel> levels;
  double v = 0.0;
  double drift_slope = 0.0;
  double diffusion_slope = 0.0;
};

/*
 * Monte Carlo estimates of the perturbation-estimate ingredients for the
 * stopped increment-tamed scheme: the reference X is the same scheme at
 * fine_level on the shared path, Y the coarse-level run, and all time
 * integrals are left-endpoint sums over the fine grid cut at the stopping
 * time. Slopes are fitted across coarse_levels.
 */
DefectReport defect_integrals(const models::SdeModel& model,
                              const DefectParams& params);

}  // namespace sdekit::diagnostics
