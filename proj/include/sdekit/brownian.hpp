#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdekit/common.hpp"

namespace sdekit::brownian {

inline constexpr int kMaxLevel = 26;

/*
 * Brownian increments on a uniform dyadic grid over [0, T].
 * Entry (n, c) is W^{(c)}_{t_{n+1}} - W^{(c)}_{t_n} with t_n = n T / 2^level.
 * Increments are stored, never path values; coarsening sums stored entries.
 */
struct IncrementGrid {
  std::uint64_t seed = 0;
  std::uint64_t path_id = 0;
  int noise_dim = 1;
  int level = 0;
  double horizon = 1.0;
  std::vector<double> increments;  // steps() x noise_dim, row-major

  std::int64_t steps() const { return std::int64_t{1} << level; }
  double h() const { return horizon / static_cast<double>(steps()); }
};

/*
 * Counter-based draw: one Philox4x32-10 evaluation keyed by
 * (seed, path_id, step, component), mapped to a standard normal with the
 * Box-Muller cosine branch. This transform choice is frozen: changing it
 * breaks replay of stored experiment outputs.
 */
double standard_normal(std::uint64_t seed, std::uint64_t path_id,
                       std::uint32_t step, std::uint32_t component);

IncrementGrid generate(std::uint64_t seed, std::uint64_t path_id,
                       int noise_dim, double horizon, int level);

/* One step of a plain (not necessarily dyadic) sequence with variance h,
 * drawn from the same keyed stream as generate. Used by long-horizon runs. */
void step_increments(std::uint64_t seed, std::uint64_t path_id,
                     std::uint32_t step, int noise_dim, double h, double* out);

/* Sum 2^by consecutive increments per output entry. Block sums use pairwise
 * dyadic summation so that partial sums of the coarse grid match partial
 * sums of the source grid bit for bit (see brownian_values). */
IncrementGrid coarsen(const IncrementGrid& g, int by);

/* W at all steps()+1 grid points, (steps()+1) x noise_dim row-major.
 * Accumulation uses the canonical dyadic association: grids related by
 * coarsen agree bit for bit at shared grid points. */
std::vector<double> brownian_values(const IncrementGrid& g);

/*
 * Binary dump, little-endian:
 *   byte 0..3   magic "SDEW"
 *   byte 4..7   noise_dim (u32)
 *   byte 8..11  level (u32)
 *   byte 12..19 horizon (f64)
 *   byte 20..27 seed (u64)
 *   byte 28..31 reserved, zero
 * followed by steps() x noise_dim increments as f64, row-major.
 */
void write_grid(const IncrementGrid& g, const std::string& path);
IncrementGrid read_grid(const std::string& path);

}  // namespace sdekit::brownian
