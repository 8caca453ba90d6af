#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sdekit/models.hpp"
#include "sdekit/schemes.hpp"

namespace sdekit::experiment {

enum class Kind { Rate, Longtime, Density, Diagnostics };

std::string kind_name(Kind kind);
Kind kind_from_name(const std::string& name);

/*
 * One experiment, fully specified. The text form is flat `section.key =
 * value` lines; `#` starts a comment. Model physics carries no defaults:
 * every parameter of the chosen model must appear. Scheme tuning knobs
 * (delta, gamma) default to 3 and 2 and are echoed back on serialization.
 */
struct ExperimentConfig {
  Kind kind = Kind::Rate;
  std::uint64_t seed = 1;
  std::int64_t paths = 0;
  std::string output_dir;

  std::string model; /* registry name */
  std::map<std::string, Vec> model_params;

  schemes::SchemeKind scheme = schemes::SchemeKind::Sitem;
  double delta = 3.0;
  double gamma = 2.0;

  /* rate */
  std::vector<int> levels;
  int ref_level = 0;
  double r_order = 2.0;
  double horizon = 1.0;

  /* longtime */
  double lt_h = 0.0;
  double lt_horizon = 0.0;
  std::vector<double> orders;
  double record_dt = 1.0;

  /* density */
  double dn_h = 0.0;
  double t_burn = 0.0;
  double t_sample = 0.0;
  std::int64_t bins = 0;

  /* diagnostics */
  std::vector<int> coarse_levels;
  int fine_level = 0;
  double p_order = 4.0;
  double q_order = 4.0;
  double z = 2.0;
  double epsilon = 1.0;
  double df_horizon = 1.0;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);

/* Re-parses the config with one `section.key` replaced (or appended), so
 * overrides pass through exactly the same validation as files. */
ExperimentConfig with_override(const ExperimentConfig& cfg,
                               const std::string& key,
                               const std::string& value);

std::vector<std::string> model_names();
models::SdeModel build_model(const ExperimentConfig& cfg);
schemes::SchemeParams scheme_params(const ExperimentConfig& cfg);

struct PresetInfo {
  std::string name;
  std::string brief;
};

const std::vector<PresetInfo>& preset_catalog();
ExperimentConfig preset_config(const std::string& name);

struct RunOptions {
  int threads = 1;
  bool svg = false;
};

/* 0 success, 2 configuration, 3 divergence, 4 I/O. */
int exit_code_for(ErrorCode code);

struct RunResult {
  int exit_code = 0;
  std::string failure; /* empty on success */
  std::vector<std::string> artifacts;
  std::vector<std::pair<std::string, double>> metrics;
};

/*
 * Executes the experiment, writing its CSV artifacts plus summary.csv into
 * cfg.output_dir. manifest.txt is written even when the experiment fails,
 * carrying the failure reason. Errors are folded into the exit code rather
 * than thrown.
 */
RunResult run(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace sdekit::experiment
