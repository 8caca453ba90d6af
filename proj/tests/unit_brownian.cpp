#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "sdekit/brownian.hpp"

using namespace sdekit;
using brownian::IncrementGrid;

TEST_CASE("generate is deterministic and sized 2^level x m") {
  IncrementGrid g = brownian::generate(1, 0, 1, 1.0, 3);
  CHECK(g.steps() == 8);
  CHECK(g.increments.size() == 8);
  CHECK(g.h() == doctest::Approx(0.125));
  IncrementGrid g2 = brownian::generate(1, 0, 1, 1.0, 3);
  CHECK(g.increments == g2.increments);

  IncrementGrid other_seed = brownian::generate(2, 0, 1, 1.0, 3);
  CHECK(g.increments != other_seed.increments);
  IncrementGrid other_path = brownian::generate(1, 1, 1, 1.0, 3);
  CHECK(g.increments != other_path.increments);
}

TEST_CASE("step_increments matches the dyadic stream") {
  IncrementGrid g = brownian::generate(42, 7, 3, 2.0, 4);
  std::vector<double> row(3);
  for (std::uint32_t s = 0; s < 16; ++s) {
    brownian::step_increments(42, 7, s, 3, g.h(), row.data());
    for (int c = 0; c < 3; ++c)
      CHECK(row[c] == g.increments[s * 3 + c]);
  }
}

TEST_CASE("coarsen by 1 sums adjacent pairs") {
  IncrementGrid g = brownian::generate(5, 2, 2, 1.0, 4);
  IncrementGrid c = brownian::coarsen(g, 1);
  CHECK(c.level == 3);
  CHECK(c.h() == doctest::Approx(2.0 * g.h()));
  for (std::int64_t k = 0; k < c.steps(); ++k)
    for (int j = 0; j < 2; ++j)
      CHECK(c.increments[k * 2 + j] ==
            g.increments[2 * k * 2 + j] + g.increments[(2 * k + 1) * 2 + j]);
}

TEST_CASE("coarsen by 0 is the identity") {
  IncrementGrid g = brownian::generate(5, 2, 2, 1.0, 6);
  IncrementGrid c = brownian::coarsen(g, 0);
  CHECK(c.level == g.level);
  CHECK(c.increments == g.increments);
}

TEST_CASE("coarse partial sums match source partial sums bit for bit") {
  for (int by : {1, 2, 3, 5}) {
    IncrementGrid g = brownian::generate(11, 4, 2, 3.0, 8);
    IncrementGrid c = brownian::coarsen(g, by);
    std::vector<double> wf = brownian::brownian_values(g);
    std::vector<double> wc = brownian::brownian_values(c);
    for (std::int64_t k = 0; k <= c.steps(); ++k)
      for (int j = 0; j < 2; ++j)
        CHECK(wc[k * 2 + j] == wf[(k << by) * 2 + j]);
  }
}

TEST_CASE("iterated coarsening equals one-shot coarsening bit for bit") {
  IncrementGrid g = brownian::generate(9, 1, 1, 1.0, 7);
  IncrementGrid c2 = brownian::coarsen(brownian::coarsen(g, 1), 1);
  IncrementGrid c = brownian::coarsen(g, 2);
  CHECK(c2.increments == c.increments);
}

TEST_CASE("empirical mean and variance of increments") {
  const int paths = 20000;
  const int level = 2;
  const int m = 2;
  const double T = 1.0;
  const double h = T / 4.0;
  const int cells = 4 * m;
  std::vector<double> sum(cells, 0.0), sumsq(cells, 0.0);
  for (int p = 0; p < paths; ++p) {
    IncrementGrid g = brownian::generate(123, p, m, T, level);
    for (int i = 0; i < cells; ++i) {
      sum[i] += g.increments[i];
      sumsq[i] += g.increments[i] * g.increments[i];
    }
  }
  double mean_tol = 4.0 * std::sqrt(h) / std::sqrt(double(paths));
  for (int i = 0; i < cells; ++i) {
    double mean = sum[i] / paths;
    double var = sumsq[i] / paths - mean * mean;
    CHECK(std::fabs(mean) < mean_tol);
    CHECK(std::fabs(var - h) < 0.05 * h);
  }
}

TEST_CASE("draws from distinct seeds and paths are near-uncorrelated") {
  const int n = 10000;
  auto corr = [&](std::uint64_t s1, std::uint64_t p1, std::uint64_t s2,
                  std::uint64_t p2) {
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (int i = 0; i < n; ++i) {
      double a = brownian::standard_normal(s1, p1, i, 0);
      double b = brownian::standard_normal(s2, p2, i, 0);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
    }
    double ca = saa / n - (sa / n) * (sa / n);
    double cb = sbb / n - (sb / n) * (sb / n);
    return (sab / n - (sa / n) * (sb / n)) / std::sqrt(ca * cb);
  };
  CHECK(std::fabs(corr(1, 0, 2, 0)) < 0.05);
  CHECK(std::fabs(corr(1, 0, 1, 1)) < 0.05);
  CHECK(std::fabs(corr(7, 3, 7, 4)) < 0.05);
}

TEST_CASE("dump round-trip and header layout") {
  IncrementGrid g = brownian::generate(7, 0, 1, 1.0, 1);
  const char* path = "test_grid.sdew";
  brownian::write_grid(g, path);

  std::FILE* f = std::fopen(path, "rb");
  REQUIRE(f);
  unsigned char raw[32 + 2 * 8];
  REQUIRE(std::fread(raw, 1, sizeof raw, f) == sizeof raw);
  std::fclose(f);
  CHECK(std::memcmp(raw, "SDEW", 4) == 0);
  std::uint32_t m, lvl;
  double horizon;
  std::uint64_t seed;
  std::memcpy(&m, raw + 4, 4);
  std::memcpy(&lvl, raw + 8, 4);
  std::memcpy(&horizon, raw + 12, 8);
  std::memcpy(&seed, raw + 20, 8);
  CHECK(m == 1);
  CHECK(lvl == 1);
  CHECK(horizon == 1.0);
  CHECK(seed == 7);
  double inc0, inc1;
  std::memcpy(&inc0, raw + 32, 8);
  std::memcpy(&inc1, raw + 40, 8);
  CHECK(inc0 == g.increments[0]);
  CHECK(inc1 == g.increments[1]);

  IncrementGrid r = brownian::read_grid(path);
  CHECK(r.seed == g.seed);
  CHECK(r.level == g.level);
  CHECK(r.noise_dim == g.noise_dim);
  CHECK(r.horizon == g.horizon);
  CHECK(r.increments == g.increments);
  std::remove(path);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(brownian::generate(1, 0, 0, 1.0, 3), Error);
  CHECK_THROWS_AS(brownian::generate(1, 0, 1, -1.0, 3), Error);
  CHECK_THROWS_AS(brownian::generate(1, 0, 1, 1.0, 27), Error);
  IncrementGrid g = brownian::generate(1, 0, 1, 1.0, 3);
  CHECK_THROWS_AS(brownian::coarsen(g, 4), Error);
  CHECK_THROWS_AS(brownian::coarsen(g, -1), Error);
  CHECK_THROWS_AS(brownian::read_grid("no_such_file.sdew"), Error);
}
