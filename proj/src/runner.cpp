#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "sdekit/diagnostics.hpp"
#include "sdekit/experiment.hpp"
#include "sdekit/harness.hpp"

namespace fs = std::filesystem;

namespace sdekit::experiment {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_i(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  return buf;
}

void write_file(const fs::path& path, const std::string& content,
                RunResult& res) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out)
    fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  res.artifacts.push_back(path.string());
}

std::string rate_svg(const harness::RateReport& rep) {
  std::vector<double> xs, ys;
  for (const harness::LevelError& lv : rep.levels) {
    if (!(lv.error > 0.0)) continue;
    xs.push_back(std::log2(lv.h));
    ys.push_back(std::log2(lv.error));
  }
  const double width = 560.0, height = 420.0;
  const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (double x : xs) { xmin = std::min(xmin, x); xmax = std::max(xmax, x); }
  for (double y : ys) { ymin = std::min(ymin, y); ymax = std::max(ymax, y); }
  /* anchor the guide lines at the coarsest level */
  std::size_t anchor = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[anchor]) anchor = i;
  auto guide_y = [&](double slope, double x) {
    return ys[anchor] + slope * (x - xs[anchor]);
  };
  for (double slope : {1.0, 0.5}) {
    ymin = std::min({ymin, guide_y(slope, xmin), guide_y(slope, xmax)});
    ymax = std::max({ymax, guide_y(slope, xmin), guide_y(slope, xmax)});
  }
  xmin -= 0.5; xmax += 0.5; ymin -= 0.5; ymax += 0.5;
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  auto line = [&](double x1, double y1, double x2, double y2,
                  const std::string& style) {
    svg += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" +
           num(x2) + "\" y2=\"" + num(y2) + "\" " + style + "/>\n";
  };
  line(ml, mt, ml, height - mb, "stroke=\"black\"");
  line(ml, height - mb, width - mr, height - mb, "stroke=\"black\"");
  for (int t = static_cast<int>(std::ceil(xmin));
       t <= static_cast<int>(std::floor(xmax)); ++t) {
    line(px(t), height - mb, px(t), height - mb + 5, "stroke=\"black\"");
    svg += "<text x=\"" + num(px(t)) + "\" y=\"" + num(height - mb + 18) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"middle\">" + fmt_i(t) + "</text>\n";
  }
  for (int t = static_cast<int>(std::ceil(ymin));
       t <= static_cast<int>(std::floor(ymax)); ++t) {
    line(ml - 5, py(t), ml, py(t), "stroke=\"black\"");
    svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(t) + 4) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"end\">" + fmt_i(t) + "</text>\n";
  }
  svg += "<text x=\"" + num((ml + width - mr) / 2) + "\" y=\"" +
         num(height - 12) +
         "\" font-family=\"monospace\" font-size=\"12\" "
         "text-anchor=\"middle\">log2 h</text>\n";
  svg += "<text x=\"14\" y=\"" + num((mt + height - mb) / 2) +
         "\" font-family=\"monospace\" font-size=\"12\" "
         "text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         num((mt + height - mb) / 2) + ")\">log2 error</text>\n";
  for (double slope : {1.0, 0.5}) {
    std::string dash = slope == 1.0 ? "6,4" : "2,3";
    line(px(xmin), py(guide_y(slope, xmin)), px(xmax), py(guide_y(slope, xmax)),
         "stroke=\"#888888\" stroke-dasharray=\"" + dash + "\"");
    svg += "<text x=\"" + num(px(xmax) - 4) + "\" y=\"" +
           num(py(guide_y(slope, xmax)) - 6) +
           "\" font-family=\"monospace\" font-size=\"11\" "
           "text-anchor=\"end\" fill=\"#888888\">slope " +
           (slope == 1.0 ? "1" : "1/2") + "</text>\n";
  }
  svg += "<polyline fill=\"none\" stroke=\"#1f77b4\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) svg += ' ';
    svg += num(px(xs[i])) + "," + num(py(ys[i]));
  }
  svg += "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg += "<circle cx=\"" + num(px(xs[i])) + "\" cy=\"" + num(py(ys[i])) +
           "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  svg += "</svg>\n";
  return svg;
}

void run_rate(const ExperimentConfig& cfg, const RunOptions& opts,
              const fs::path& dir, RunResult& res) {
  models::SdeModel mdl = build_model(cfg);
  harness::StrongErrorSpec spec;
  spec.scheme = cfg.scheme;
  spec.params = scheme_params(cfg);
  spec.seed = cfg.seed;
  spec.paths = cfg.paths;
  spec.levels = cfg.levels;
  spec.ref_level = cfg.ref_level;
  spec.horizon = cfg.horizon;
  spec.r_order = cfg.r_order;
  spec.threads = opts.threads;
  harness::RateReport rep = harness::strong_error(mdl, spec);

  std::string csv = "scheme,model,level,h,error_Lr,r,paths,diverged\n";
  for (const harness::LevelError& lv : rep.levels)
    csv += rep.scheme + "," + rep.model + "," + fmt_i(lv.level) + "," +
           fmt(lv.h) + "," + fmt(lv.error) + "," + fmt(rep.r_order) + "," +
           fmt_i(lv.paths_used) + "," + fmt_i(lv.diverged) + "\n";
  write_file(dir / "rates.csv", csv, res);
  if (opts.svg) write_file(dir / "rates.svg", rate_svg(rep), res);

  res.metrics.emplace_back("slope", rep.slope);
  res.metrics.emplace_back("intercept", rep.intercept);
  res.metrics.emplace_back("residual", rep.residual);
  res.metrics.emplace_back("levels_used",
                           static_cast<double>(rep.levels.size()));
}

void run_longtime(const ExperimentConfig& cfg, const RunOptions& opts,
                  const fs::path& dir, RunResult& res) {
  models::SdeModel mdl = build_model(cfg);
  harness::MomentSeries series = harness::longtime_moments(
      mdl, cfg.scheme, scheme_params(cfg), cfg.seed, cfg.paths, cfg.lt_h,
      cfg.lt_horizon, cfg.orders, cfg.record_dt, opts.threads);

  std::string csv = "t,p,moment\n";
  std::size_t n_ord = series.orders.size();
  for (std::size_t rt = 0; rt < series.times.size(); ++rt)
    for (std::size_t oi = 0; oi < n_ord; ++oi)
      csv += fmt(series.times[rt]) + "," + fmt(series.orders[oi]) + "," +
             fmt(series.moments[rt * n_ord + oi]) + "\n";
  write_file(dir / "moments.csv", csv, res);

  for (std::size_t oi = 0; oi < n_ord; ++oi) {
    std::string tag = "_p" + fmt(series.orders[oi]);
    double peak = 0.0;
    bool any = false;
    for (std::size_t rt = 0; rt < series.times.size(); ++rt) {
      double m = series.moments[rt * n_ord + oi];
      if (!std::isfinite(m)) continue;
      peak = any ? std::max(peak, m) : m;
      any = true;
      if (series.times[rt] == 1.0)
        res.metrics.emplace_back("moment_at_t1" + tag, m);
    }
    if (any) res.metrics.emplace_back("max_moment" + tag, peak);
  }
  res.metrics.emplace_back("mean_square_time_average",
                           series.mean_square_time_average);
  res.metrics.emplace_back("median_terminal_abs",
                           harness::median(series.terminal_abs));
  res.metrics.emplace_back("alive_final",
                           static_cast<double>(series.alive.back()));
}

void run_density(const ExperimentConfig& cfg, const RunOptions& opts,
                 const fs::path& dir, RunResult& res) {
  models::SdeModel mdl = build_model(cfg);
  harness::DensityReport rep = harness::stationary_density_check(
      mdl, cfg.scheme, scheme_params(cfg), cfg.seed, cfg.paths, cfg.dn_h,
      cfg.t_burn, cfg.t_sample, static_cast<int>(cfg.bins), opts.threads);

  std::string csv = "bin_center,empirical,analytic\n";
  for (std::size_t b = 0; b < rep.bin_centers.size(); ++b)
    csv += fmt(rep.bin_centers[b]) + "," + fmt(rep.empirical[b]) + "," +
           fmt(rep.analytic[b]) + "\n";
  write_file(dir / "density.csv", csv, res);

  res.metrics.emplace_back("l1_distance", rep.l1_distance);
  res.metrics.emplace_back("analytic_mass", rep.analytic_mass);
  res.metrics.emplace_back("samples", static_cast<double>(rep.samples));
}

void run_diagnostics(const ExperimentConfig& cfg, const RunOptions& opts,
                     const fs::path& dir, RunResult& res) {
  models::SdeModel mdl = build_model(cfg);
  diagnostics::DefectParams dp;
  dp.taming = taming::TamingParams{cfg.delta};
  dp.eta = diagnostics::EtaParams{cfg.z, cfg.epsilon};
  dp.p = cfg.p_order;
  dp.q = cfg.q_order;
  dp.seed = cfg.seed;
  dp.paths = cfg.paths;
  dp.coarse_levels = cfg.coarse_levels;
  dp.fine_level = cfg.fine_level;
  dp.horizon = cfg.df_horizon;
  dp.threads = opts.threads;
  diagnostics::DefectReport rep = diagnostics::defect_integrals(mdl, dp);

  std::string csv =
      "level,h,drift_defect,diffusion_defect,exp_weight_log,lhs,"
      "implied_constant\n";
  for (const diagnostics::DefectLevel& lv : rep.levels)
    csv += fmt_i(lv.level) + "," + fmt(lv.h) + "," + fmt(lv.drift_defect) +
           "," + fmt(lv.diffusion_defect) + "," + fmt(lv.exp_weight_log) +
           "," + fmt(lv.lhs) + "," + fmt(lv.implied_constant) + "\n";
  write_file(dir / "defects.csv", csv, res);

  res.metrics.emplace_back("drift_slope", rep.drift_slope);
  res.metrics.emplace_back("diffusion_slope", rep.diffusion_slope);
  res.metrics.emplace_back("v", rep.v);
}

}  // namespace

RunResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
  RunResult res;
  auto t0 = std::chrono::steady_clock::now();
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    res.exit_code = 4;
    res.failure = "cannot create output directory '" + cfg.output_dir + "'";
    return res;
  }

  try {
    if (opts.threads < 1)
      fail(ErrorCode::InvalidArgument, "thread count must be >= 1");
    switch (cfg.kind) {
      case Kind::Rate: run_rate(cfg, opts, dir, res); break;
      case Kind::Longtime: run_longtime(cfg, opts, dir, res); break;
      case Kind::Density: run_density(cfg, opts, dir, res); break;
      case Kind::Diagnostics: run_diagnostics(cfg, opts, dir, res); break;
    }
    std::string csv = "metric,value\n";
    for (const auto& [name, value] : res.metrics)
      csv += name + "," + fmt(value) + "\n";
    write_file(dir / "summary.csv", csv, res);
  } catch (const Error& e) {
    res.exit_code = exit_code_for(e.code());
    res.failure = e.what();
  } catch (const std::exception& e) {
    res.exit_code = 4;
    res.failure = e.what();
  }

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  std::string manifest;
  manifest += "sdekit " + std::string(kVersion) + "\n";
  manifest += std::string("status: ") + (res.exit_code == 0 ? "ok" : "failed");
  manifest += "\n";
  if (res.exit_code != 0) manifest += "reason: " + res.failure + "\n";
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", wall);
    manifest += std::string("wall_time_seconds: ") + buf + "\n";
  }
  manifest += "threads: " + fmt_i(opts.threads) + "\n";
  manifest += "config:\n";
  manifest += serialize(cfg);
  try {
    write_file(dir / "manifest.txt", manifest, res);
  } catch (const Error& e) {
    if (res.exit_code == 0) {
      res.exit_code = exit_code_for(e.code());
      res.failure = e.what();
    }
  }
  return res;
}

}  // namespace sdekit::experiment
