#include <cstring>
#include <new>
#include <string>
#include <utility>

#include "sdekit.h"
#include "sdekit/brownian.hpp"
#include "sdekit/experiment.hpp"

struct sdekit_config {
  sdekit::experiment::ExperimentConfig cfg;
  std::string rendered;
};

struct sdekit_result {
  sdekit::experiment::RunResult res;
};

struct sdekit_grid {
  sdekit::brownian::IncrementGrid grid;
};

namespace {

void put_message(char* buf, size_t len, const std::string& msg) {
  if (!buf || len == 0) return;
  size_t n = msg.size() < len - 1 ? msg.size() : len - 1;
  std::memcpy(buf, msg.data(), n);
  buf[n] = '\0';
}

sdekit_status status_of_exit(int exit_code) {
  switch (exit_code) {
    case 0: return SDEKIT_OK;
    case 2: return SDEKIT_ERR_CONFIG;
    case 3: return SDEKIT_ERR_DIVERGENCE;
    default: return SDEKIT_ERR_IO;
  }
}

template <typename Fn>
sdekit_status guarded(char* errbuf, size_t errlen, Fn&& fn) {
  try {
    fn();
    return SDEKIT_OK;
  } catch (const sdekit::Error& e) {
    put_message(errbuf, errlen, e.what());
    return status_of_exit(sdekit::experiment::exit_code_for(e.code()));
  } catch (const std::bad_alloc&) {
    put_message(errbuf, errlen, "out of memory");
    return SDEKIT_ERR_IO;
  } catch (const std::exception& e) {
    put_message(errbuf, errlen, e.what());
    return SDEKIT_ERR_IO;
  }
}

sdekit_status null_arg(const char* what, char* errbuf, size_t errlen) {
  put_message(errbuf, errlen, std::string(what) + " must not be null");
  return SDEKIT_ERR_CONFIG;
}

}  // namespace

extern "C" {

const char* sdekit_version(void) { return sdekit::kVersion; }

sdekit_status sdekit_config_parse(const char* text, sdekit_config** out,
                                  char* errbuf, size_t errlen) {
  if (!text) return null_arg("text", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto cfg = sdekit::experiment::parse_config(text);
    *out = new sdekit_config{std::move(cfg), {}};
  });
}

sdekit_status sdekit_config_load(const char* path, sdekit_config** out,
                                 char* errbuf, size_t errlen) {
  if (!path) return null_arg("path", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto cfg = sdekit::experiment::load_config(path);
    *out = new sdekit_config{std::move(cfg), {}};
  });
}

sdekit_status sdekit_config_set(sdekit_config* cfg, const char* key,
                                const char* value, char* errbuf,
                                size_t errlen) {
  if (!cfg) return null_arg("cfg", errbuf, errlen);
  if (!key) return null_arg("key", errbuf, errlen);
  if (!value) return null_arg("value", errbuf, errlen);
  return guarded(errbuf, errlen, [&] {
    cfg->cfg = sdekit::experiment::with_override(cfg->cfg, key, value);
  });
}

const char* sdekit_config_render(sdekit_config* cfg) {
  if (!cfg) return "";
  cfg->rendered = sdekit::experiment::serialize(cfg->cfg);
  return cfg->rendered.c_str();
}

void sdekit_config_destroy(sdekit_config* cfg) { delete cfg; }

int sdekit_preset_count(void) {
  return static_cast<int>(sdekit::experiment::preset_catalog().size());
}

const char* sdekit_preset_name(int index) {
  const auto& catalog = sdekit::experiment::preset_catalog();
  if (index < 0 || index >= static_cast<int>(catalog.size())) return nullptr;
  return catalog[index].name.c_str();
}

const char* sdekit_preset_brief(int index) {
  const auto& catalog = sdekit::experiment::preset_catalog();
  if (index < 0 || index >= static_cast<int>(catalog.size())) return nullptr;
  return catalog[index].brief.c_str();
}

sdekit_status sdekit_preset_config(const char* name, sdekit_config** out,
                                   char* errbuf, size_t errlen) {
  if (!name) return null_arg("name", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto cfg = sdekit::experiment::preset_config(name);
    *out = new sdekit_config{std::move(cfg), {}};
  });
}

sdekit_status sdekit_run(const sdekit_config* cfg, int threads, int write_svg,
                         sdekit_result** out, char* errbuf, size_t errlen) {
  if (!cfg) return null_arg("cfg", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  sdekit_status status = SDEKIT_OK;
  sdekit_status guard = guarded(errbuf, errlen, [&] {
    sdekit::experiment::RunOptions opts;
    opts.threads = threads;
    opts.svg = write_svg != 0;
    sdekit::experiment::RunResult res = sdekit::experiment::run(cfg->cfg, opts);
    status = status_of_exit(res.exit_code);
    if (res.exit_code != 0) put_message(errbuf, errlen, res.failure);
    *out = new sdekit_result{std::move(res)};
  });
  return guard == SDEKIT_OK ? status : guard;
}

int sdekit_result_exit_code(const sdekit_result* res) {
  return res ? res->res.exit_code : 2;
}

const char* sdekit_result_failure(const sdekit_result* res) {
  return res ? res->res.failure.c_str() : "";
}

int sdekit_result_metric_count(const sdekit_result* res) {
  return res ? static_cast<int>(res->res.metrics.size()) : 0;
}

const char* sdekit_result_metric_name(const sdekit_result* res, int index) {
  if (!res || index < 0 ||
      index >= static_cast<int>(res->res.metrics.size()))
    return nullptr;
  return res->res.metrics[index].first.c_str();
}

double sdekit_result_metric_value(const sdekit_result* res, int index) {
  if (!res || index < 0 ||
      index >= static_cast<int>(res->res.metrics.size()))
    return 0.0;
  return res->res.metrics[index].second;
}

int sdekit_result_metric_find(const sdekit_result* res, const char* name,
                              double* value) {
  if (!res || !name) return 0;
  for (const auto& [metric, v] : res->res.metrics)
    if (metric == name) {
      if (value) *value = v;
      return 1;
    }
  return 0;
}

int sdekit_result_artifact_count(const sdekit_result* res) {
  return res ? static_cast<int>(res->res.artifacts.size()) : 0;
}

const char* sdekit_result_artifact(const sdekit_result* res, int index) {
  if (!res || index < 0 ||
      index >= static_cast<int>(res->res.artifacts.size()))
    return nullptr;
  return res->res.artifacts[index].c_str();
}

void sdekit_result_destroy(sdekit_result* res) { delete res; }

sdekit_status sdekit_grid_generate(uint64_t seed, uint64_t path_id,
                                   int noise_dim, double horizon, int level,
                                   sdekit_grid** out, char* errbuf,
                                   size_t errlen) {
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto grid =
        sdekit::brownian::generate(seed, path_id, noise_dim, horizon, level);
    *out = new sdekit_grid{std::move(grid)};
  });
}

sdekit_status sdekit_grid_coarsen(const sdekit_grid* fine, int by,
                                  sdekit_grid** out, char* errbuf,
                                  size_t errlen) {
  if (!fine) return null_arg("fine", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto grid = sdekit::brownian::coarsen(fine->grid, by);
    *out = new sdekit_grid{std::move(grid)};
  });
}

int64_t sdekit_grid_steps(const sdekit_grid* grid) {
  return grid ? grid->grid.steps() : 0;
}

int sdekit_grid_noise_dim(const sdekit_grid* grid) {
  return grid ? grid->grid.noise_dim : 0;
}

int sdekit_grid_level(const sdekit_grid* grid) {
  return grid ? grid->grid.level : 0;
}

double sdekit_grid_h(const sdekit_grid* grid) {
  return grid ? grid->grid.h() : 0.0;
}

const double* sdekit_grid_data(const sdekit_grid* grid) {
  return grid ? grid->grid.increments.data() : nullptr;
}

sdekit_status sdekit_grid_write(const sdekit_grid* grid, const char* path,
                                char* errbuf, size_t errlen) {
  if (!grid) return null_arg("grid", errbuf, errlen);
  if (!path) return null_arg("path", errbuf, errlen);
  return guarded(errbuf, errlen,
                 [&] { sdekit::brownian::write_grid(grid->grid, path); });
}

sdekit_status sdekit_grid_read(const char* path, sdekit_grid** out,
                               char* errbuf, size_t errlen) {
  if (!path) return null_arg("path", errbuf, errlen);
  if (!out) return null_arg("out", errbuf, errlen);
  *out = nullptr;
  return guarded(errbuf, errlen, [&] {
    auto grid = sdekit::brownian::read_grid(path);
    *out = new sdekit_grid{std::move(grid)};
  });
}

void sdekit_grid_destroy(sdekit_grid* grid) { delete grid; }

}  // extern "C"
