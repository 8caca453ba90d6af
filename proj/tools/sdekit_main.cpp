#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdekit.h"

namespace {

/* Runs cfg, prints the summary metrics and artifact paths, and returns the
 * process exit code. Takes ownership of cfg. */
int run_and_report(sdekit_config* cfg, int threads, bool svg) {
  char err[512] = {0};
  sdekit_result* res = nullptr;
  sdekit_status status =
      sdekit_run(cfg, threads, svg ? 1 : 0, &res, err, sizeof err);
  int code = res ? sdekit_result_exit_code(res) : static_cast<int>(status);
  if (code != 0) {
    const char* reason =
        res && *sdekit_result_failure(res) ? sdekit_result_failure(res) : err;
    std::fprintf(stderr, "sdekit: %s\n", reason);
  } else {
    for (int i = 0; i < sdekit_result_metric_count(res); ++i)
      std::printf("%s = %.17g\n", sdekit_result_metric_name(res, i),
                  sdekit_result_metric_value(res, i));
    for (int i = 0; i < sdekit_result_artifact_count(res); ++i)
      std::printf("wrote %s\n", sdekit_result_artifact(res, i));
  }
  sdekit_result_destroy(res);
  sdekit_config_destroy(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "strong-approximation experiments for SDEs without global "
      "monotonicity"};
  app.set_version_flag("--version", sdekit_version());
  app.require_subcommand(1);

  std::string config_path;
  int threads = 1;
  bool svg = false;
  CLI::App* run_cmd =
      app.add_subcommand("run", "execute an experiment config file");
  run_cmd->add_option("config", config_path, "experiment config file")
      ->required();
  run_cmd->add_flag("--svg", svg, "also write a log2-log2 rate plot");
  run_cmd->add_option("--threads", threads, "worker thread count");

  std::string preset_name;
  std::vector<std::string> overrides;
  bool show = false;
  int pthreads = 1;
  bool psvg = false;
  CLI::App* preset_cmd =
      app.add_subcommand("preset", "run a built-in experiment preset");
  preset_cmd->add_option("name", preset_name, "preset name")->required();
  preset_cmd
      ->add_option("--override", overrides,
                   "key=value replacing one config entry")
      ->type_size(1);
  preset_cmd->add_flag("--show", show,
                       "print the effective config instead of running");
  preset_cmd->add_flag("--svg", psvg, "also write a log2-log2 rate plot");
  preset_cmd->add_option("--threads", pthreads, "worker thread count");

  CLI::App* list_cmd =
      app.add_subcommand("list-presets", "show the preset catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  char err[512] = {0};
  if (list_cmd->parsed()) {
    for (int i = 0; i < sdekit_preset_count(); ++i)
      std::printf("%-26s %s\n", sdekit_preset_name(i), sdekit_preset_brief(i));
    return 0;
  }

  if (run_cmd->parsed()) {
    sdekit_config* cfg = nullptr;
    sdekit_status status =
        sdekit_config_load(config_path.c_str(), &cfg, err, sizeof err);
    if (status != SDEKIT_OK) {
      std::fprintf(stderr, "sdekit: %s\n", err);
      return static_cast<int>(status);
    }
    return run_and_report(cfg, threads, svg);
  }

  /* preset */
  sdekit_config* cfg = nullptr;
  sdekit_status status =
      sdekit_preset_config(preset_name.c_str(), &cfg, err, sizeof err);
  if (status != SDEKIT_OK) {
    std::fprintf(stderr, "sdekit: %s\n", err);
    return static_cast<int>(status);
  }
  for (const std::string& kv : overrides) {
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "sdekit: override '%s' is not key=value\n",
                   kv.c_str());
      sdekit_config_destroy(cfg);
      return 2;
    }
    std::string key = kv.substr(0, eq);
    std::string value = kv.substr(eq + 1);
    while (!key.empty() && key.back() == ' ') key.pop_back();
    while (!value.empty() && value.front() == ' ') value.erase(0, 1);
    status = sdekit_config_set(cfg, key.c_str(), value.c_str(), err,
                               sizeof err);
    if (status != SDEKIT_OK) {
      std::fprintf(stderr, "sdekit: %s\n", err);
      sdekit_config_destroy(cfg);
      return static_cast<int>(status);
    }
  }
  if (show) {
    std::fputs(sdekit_config_render(cfg), stdout);
    sdekit_config_destroy(cfg);
    return 0;
  }
  return run_and_report(cfg, pthreads, psvg);
}
