#include "sdekit/brownian.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

namespace sdekit::brownian {

namespace {

/* Philox4x32-10 (Salmon et al. round function, standard constants). */
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline std::uint64_t join64(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

/* Pairwise sum of an aligned block [begin, begin + 2^lvl) of one component. */
double block_sum(const double* base, int stride, std::int64_t begin, int lvl) {
  if (lvl == 0) return base[begin * stride];
  std::int64_t half = std::int64_t{1} << (lvl - 1);
  return block_sum(base, stride, begin, lvl - 1) +
         block_sum(base, stride, begin + half, lvl - 1);
}

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t path_id,
                       std::uint32_t step, std::uint32_t component) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(path_id),
      static_cast<std::uint32_t>(path_id >> 32), step, component};
  std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                      static_cast<std::uint32_t>(seed >> 32)};
  std::array<std::uint32_t, 4> r = philox4x32_10(ctr, key);
  /* u1 in (0, 1], u2 in [0, 1). */
  double u1 = static_cast<double>((join64(r[0], r[1]) >> 11) + 1) * 0x1.0p-53;
  double u2 = static_cast<double>(join64(r[2], r[3]) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void step_increments(std::uint64_t seed, std::uint64_t path_id,
                     std::uint32_t step, int noise_dim, double h,
                     double* out) {
  double scale = std::sqrt(h);
  for (int c = 0; c < noise_dim; ++c)
    out[c] = scale * standard_normal(seed, path_id, step,
                                     static_cast<std::uint32_t>(c));
}

IncrementGrid generate(std::uint64_t seed, std::uint64_t path_id,
                       int noise_dim, double horizon, int level) {
  if (noise_dim < 1)
    fail(ErrorCode::InvalidArgument, "generate: noise_dim must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    fail(ErrorCode::InvalidArgument, "generate: horizon must be positive");
  if (level < 0 || level > kMaxLevel)
    fail(ErrorCode::InvalidArgument,
         "generate: level must be in [0, " + std::to_string(kMaxLevel) + "]");
  IncrementGrid g;
  g.seed = seed;
  g.path_id = path_id;
  g.noise_dim = noise_dim;
  g.level = level;
  g.horizon = horizon;
  std::int64_t n = g.steps();
  g.increments.resize(static_cast<std::size_t>(n) * noise_dim);
  double scale = std::sqrt(g.h());
  for (std::int64_t s = 0; s < n; ++s)
    for (int c = 0; c < noise_dim; ++c)
      g.increments[static_cast<std::size_t>(s) * noise_dim + c] =
          scale * standard_normal(seed, path_id, static_cast<std::uint32_t>(s),
                                  static_cast<std::uint32_t>(c));
  return g;
}

IncrementGrid coarsen(const IncrementGrid& g, int by) {
  if (by < 0 || by > g.level)
    fail(ErrorCode::InvalidArgument, "coarsen: need 0 <= by <= level");
  IncrementGrid out;
  out.seed = g.seed;
  out.path_id = g.path_id;
  out.noise_dim = g.noise_dim;
  out.level = g.level - by;
  out.horizon = g.horizon;
  std::int64_t n = out.steps();
  out.increments.resize(static_cast<std::size_t>(n) * g.noise_dim);
  for (int c = 0; c < g.noise_dim; ++c) {
    const double* base = g.increments.data() + c;
    for (std::int64_t k = 0; k < n; ++k)
      out.increments[static_cast<std::size_t>(k) * g.noise_dim + c] =
          block_sum(base, g.noise_dim, k << by, by);
  }
  return out;
}

std::vector<double> brownian_values(const IncrementGrid& g) {
  std::int64_t n = g.steps();
  std::vector<double> w(static_cast<std::size_t>(n + 1) * g.noise_dim, 0.0);
  /* Binary-counter stack of aligned block sums per component; evaluating the
   * stack bottom to top realizes the canonical dyadic association. */
  std::vector<std::vector<double>> stack(g.noise_dim);
  std::vector<std::vector<int>> stack_lvl(g.noise_dim);
  for (std::int64_t s = 0; s < n; ++s) {
    for (int c = 0; c < g.noise_dim; ++c) {
      auto& sums = stack[c];
      auto& lvls = stack_lvl[c];
      sums.push_back(g.increments[static_cast<std::size_t>(s) * g.noise_dim + c]);
      lvls.push_back(0);
      while (lvls.size() >= 2 && lvls[lvls.size() - 1] == lvls[lvls.size() - 2]) {
        sums[sums.size() - 2] += sums.back();
        sums.pop_back();
        lvls[lvls.size() - 2] += 1;
        lvls.pop_back();
      }
      double acc = 0.0;
      for (double b : sums) acc += b;
      w[static_cast<std::size_t>(s + 1) * g.noise_dim + c] = acc;
    }
  }
  return w;
}

void write_grid(const IncrementGrid& g, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "grid dump assumes a little-endian host");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail(ErrorCode::Io, "write_grid: cannot open " + path);
  unsigned char header[32] = {0};
  std::memcpy(header, "SDEW", 4);
  std::uint32_t m = static_cast<std::uint32_t>(g.noise_dim);
  std::uint32_t lvl = static_cast<std::uint32_t>(g.level);
  std::memcpy(header + 4, &m, 4);
  std::memcpy(header + 8, &lvl, 4);
  std::memcpy(header + 12, &g.horizon, 8);
  std::memcpy(header + 20, &g.seed, 8);
  bool ok = std::fwrite(header, 1, 32, f) == 32 &&
            std::fwrite(g.increments.data(), sizeof(double),
                        g.increments.size(), f) == g.increments.size();
  ok = std::fclose(f) == 0 && ok;
  if (!ok) fail(ErrorCode::Io, "write_grid: short write to " + path);
}

IncrementGrid read_grid(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail(ErrorCode::Io, "read_grid: cannot open " + path);
  unsigned char header[32];
  if (std::fread(header, 1, 32, f) != 32) {
    std::fclose(f);
    fail(ErrorCode::Io, "read_grid: truncated header in " + path);
  }
  if (std::memcmp(header, "SDEW", 4) != 0) {
    std::fclose(f);
    fail(ErrorCode::Io, "read_grid: bad magic in " + path);
  }
  std::uint32_t m = 0, lvl = 0;
  IncrementGrid g;
  std::memcpy(&m, header + 4, 4);
  std::memcpy(&lvl, header + 8, 4);
  std::memcpy(&g.horizon, header + 12, 8);
  std::memcpy(&g.seed, header + 20, 8);
  if (m < 1 || lvl > static_cast<std::uint32_t>(kMaxLevel) ||
      !(g.horizon > 0.0)) {
    std::fclose(f);
    fail(ErrorCode::Io, "read_grid: invalid header fields in " + path);
  }
  g.noise_dim = static_cast<int>(m);
  g.level = static_cast<int>(lvl);
  g.increments.resize(static_cast<std::size_t>(g.steps()) * g.noise_dim);
  std::size_t got = std::fread(g.increments.data(), sizeof(double),
                               g.increments.size(), f);
  std::fclose(f);
  if (got != g.increments.size())
    fail(ErrorCode::Io, "read_grid: truncated payload in " + path);
  return g;
}

}  // namespace sdekit::brownian
