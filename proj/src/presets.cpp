#include <cmath>

#include "sdekit/experiment.hpp"

namespace sdekit::experiment {

namespace {

ExperimentConfig langevin_base() {
  ExperimentConfig cfg;
  cfg.model = "langevin";
  cfg.model_params = {
      {"gamma", {1.0}}, {"beta", {2.0}}, {"x0", {1.0, 1.0}}};
  cfg.scheme = schemes::SchemeKind::Sitem;
  return cfg;
}

ExperimentConfig lv_base(double noise_scale) {
  ExperimentConfig cfg;
  cfg.model = "lotka_volterra";
  cfg.model_params = {{"d", {2.0}},
                      {"m", {2.0}},
                      {"b", {1.0, 0.5}},
                      {"a", {1.0, 0.5, 0.0, 0.5}},
                      {"sigma", {noise_scale * 1.0, 0.0, 0.0,
                                 noise_scale * 0.75}},
                      {"x0", {1.0, 3.0}}};
  cfg.scheme = schemes::SchemeKind::LvMilstein;
  return cfg;
}

void desk_rate(ExperimentConfig& cfg) {
  cfg.kind = Kind::Rate;
  cfg.paths = 500;
  cfg.levels = {6, 7, 8, 9, 10};
  cfg.ref_level = 12;
  cfg.r_order = 2.0;
  cfg.horizon = 1.0;
}

ExperimentConfig make(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "langevin-rate") {
    cfg = langevin_base();
    desk_rate(cfg);
  } else if (name == "vdp-rate-additive") {
    cfg.model = "van_der_pol_additive";
    cfg.model_params = {{"gamma", {0.2}},
                        {"alpha", {0.2}},
                        {"beta", {1.0}},
                        {"theta", {std::sqrt(0.1)}},
                        {"noise_dim", {1.0}},
                        {"x0", {0.5, 1.5}}};
    desk_rate(cfg);
  } else if (name == "vdp-rate-multiplicative") {
    cfg.model = "van_der_pol_multiplicative";
    cfg.model_params = {{"gamma", {0.2}},     {"alpha", {0.2}},
                        {"beta", {1.0}},      {"phi_slope", {0.8}},
                        {"noise_dim", {1.0}}, {"x0", {0.5, 1.5}}};
    desk_rate(cfg);
  } else if (name == "lorenz-rate") {
    cfg.model = "lorenz";
    cfg.model_params = {
        {"a1", {1.0}},
        {"a2", {1.0}},
        {"a3", {1.0}},
        {"noise", {0.5, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 0.5}},
        {"x0", {1.0, 2.0, 3.0}}};
    desk_rate(cfg);
  } else if (name == "lv-rate") {
    cfg = lv_base(1.0);
    desk_rate(cfg);
  } else if (name == "lv-longtime") {
    cfg = lv_base(1.0);
    cfg.kind = Kind::Longtime;
    cfg.paths = 2000;
    cfg.lt_h = 0.0078125;
    cfg.lt_horizon = 500.0;
    cfg.orders = {1.0, 2.0};
    cfg.record_dt = 1.0;
  } else if (name == "lv-permanence") {
    cfg = lv_base(1.0);
    cfg.kind = Kind::Longtime;
    cfg.paths = 500;
    cfg.lt_h = 0.125;
    cfg.lt_horizon = 500.0;
    cfg.orders = {1.0, 2.0};
    cfg.record_dt = 1.0;
  } else if (name == "lv-extinction") {
    cfg = lv_base(2.0);
    cfg.kind = Kind::Longtime;
    cfg.paths = 500;
    cfg.lt_h = 0.125;
    cfg.lt_horizon = 500.0;
    cfg.orders = {1.0, 2.0};
    cfg.record_dt = 1.0;
  } else if (name == "langevin-density") {
    cfg = langevin_base();
    cfg.kind = Kind::Density;
    cfg.paths = 20;
    cfg.dn_h = 0.0078125;
    cfg.t_burn = 100.0;
    cfg.t_sample = 400.0;
    cfg.bins = 64;
  } else if (name == "sitem-defects") {
    cfg = langevin_base();
    cfg.kind = Kind::Diagnostics;
    cfg.paths = 200;
    cfg.coarse_levels = {6, 7, 8, 9};
    cfg.fine_level = 12;
    cfg.p_order = 4.0;
    cfg.q_order = 4.0;
    cfg.z = 2.0;
    cfg.epsilon = 1.0;
    cfg.df_horizon = 1.0;
  } else {
    std::string names;
    for (const PresetInfo& info : preset_catalog()) {
      if (!names.empty()) names += ", ";
      names += info.name;
    }
    fail(ErrorCode::Config,
         "unknown preset '" + name + "' (valid: " + names + ")");
  }
  cfg.seed = 1;
  cfg.output_dir = "out/" + name;
  return cfg;
}

}  // namespace

const std::vector<PresetInfo>& preset_catalog() {
  static const std::vector<PresetInfo> catalog = {
      {"langevin-rate",
       "strong convergence rate of the stopped tamed scheme on Langevin "
       "dynamics"},
      {"vdp-rate-additive",
       "strong rate on the van der Pol oscillator with additive noise"},
      {"vdp-rate-multiplicative",
       "strong rate on the van der Pol oscillator with state-dependent "
       "noise"},
      {"lorenz-rate", "strong rate on the noisy Lorenz system"},
      {"lv-rate",
       "strong rate of the positivity-preserving Milstein scheme on "
       "Lotka-Volterra"},
      {"lv-longtime",
       "long-horizon first and second moments of the Lotka-Volterra scheme"},
      {"lv-permanence", "terminal population sizes under the base noise"},
      {"lv-extinction", "terminal population sizes with the noise doubled"},
      {"langevin-density",
       "empirical stationary density of Langevin dynamics against the Gibbs "
       "marginal"},
      {"sitem-defects",
       "interpolant defect integrals and exponential weight of the stopped "
       "tamed scheme"},
  };
  return catalog;
}

ExperimentConfig preset_config(const std::string& name) { return make(name); }

}  // namespace sdekit::experiment
