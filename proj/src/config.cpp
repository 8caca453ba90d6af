#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>

#include "sdekit/experiment.hpp"

namespace sdekit::experiment {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_int(std::int64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(int line, const std::string& what) {
  fail(ErrorCode::Config, "config: line " + fmt_int(line) + ": " + what);
}

[[noreturn]] void bad(const std::string& what) {
  fail(ErrorCode::Config, "config: " + what);
}

bool valid_key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.';
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class Entries {
 public:
  void insert(const std::string& key, std::string value, int line) {
    auto [it, fresh] = kv_.try_emplace(key, Entry{std::move(value), line});
    if (!fresh)
      bad(line, "duplicate key '" + key + "' (first at line " +
                    fmt_int(it->second.line) + ")");
  }

  const Entry* find(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) bad("missing required key '" + key + "'");
    return *e;
  }

  /* every entry must have been consumed */
  void finish() const {
    const std::pair<const std::string, Entry>* worst = nullptr;
    for (const auto& kv : kv_) {
      if (kv.second.used) continue;
      if (!worst || kv.second.line < worst->second.line) worst = &kv;
    }
    if (worst)
      bad(worst->second.line,
          "key '" + worst->first + "' is not recognized for this experiment");
  }

 private:
  std::map<std::string, Entry> kv_;
};

Entries tokenize(const std::string& text) {
  Entries out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line(text.data() + pos,
                          (nl == std::string::npos ? text.size() : nl) - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      bad(line_no, "expected 'section.key = value'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || !std::all_of(key.begin(), key.end(), valid_key_char))
      bad(line_no, "malformed key '" + std::string(key) + "'");
    std::size_t dots = std::count(key.begin(), key.end(), '.');
    if (dots != 1 || key.front() == '.' || key.back() == '.')
      bad(line_no, "key '" + std::string(key) + "' must be 'section.key'");
    if (value.empty())
      bad(line_no, "empty value for key '" + std::string(key) + "'");
    out.insert(std::string(key), std::string(value), line_no);
  }
  return out;
}

double parse_double(const Entry& e, const std::string& key) {
  std::string_view s = trim(e.value);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() ||
      !std::isfinite(v))
    bad(e.line, "value for '" + key + "' is not a finite number");
  return v;
}

std::int64_t parse_int(const Entry& e, const std::string& key) {
  std::string_view s = trim(e.value);
  std::int64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad(e.line, "value for '" + key + "' is not an integer");
  return v;
}

std::uint64_t parse_uint(const Entry& e, const std::string& key) {
  std::string_view s = trim(e.value);
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    bad(e.line, "value for '" + key + "' is not a nonnegative integer");
  return v;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = s.find(',', start);
    std::string_view part = trim(
        s.substr(start, comma == std::string_view::npos ? comma : comma - start));
    parts.emplace_back(part);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

Vec parse_double_list(const Entry& e, const std::string& key) {
  Vec out;
  for (const std::string& part : split_list(e.value)) {
    Entry item{part, e.line};
    out.push_back(parse_double(item, key));
  }
  return out;
}

/* integers, with `a..b` expanding to the inclusive range */
std::vector<int> parse_int_list(const Entry& e, const std::string& key) {
  std::vector<int> out;
  for (const std::string& part : split_list(e.value)) {
    std::size_t dots = part.find("..");
    if (dots != std::string::npos) {
      Entry lo{part.substr(0, dots), e.line};
      Entry hi{part.substr(dots + 2), e.line};
      std::int64_t a = parse_int(lo, key), b = parse_int(hi, key);
      if (a > b) bad(e.line, "range for '" + key + "' runs backwards");
      if (b - a > 256) bad(e.line, "range for '" + key + "' is too wide");
      for (std::int64_t v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
    } else {
      Entry item{part, e.line};
      out.push_back(static_cast<int>(parse_int(item, key)));
    }
  }
  return out;
}

struct ParamSpec {
  const char* key;
  int size; /* -1: any positive length */
  bool integer;
};

struct ModelSpec {
  const char* name;
  std::vector<ParamSpec> params;
};

const std::vector<ModelSpec>& registry() {
  static const std::vector<ModelSpec> specs = {
      {"gbm", {{"mu", 1, false}, {"sigma", 1, false}, {"x0", 1, false}}},
      {"langevin",
       {{"gamma", 1, false}, {"beta", 1, false}, {"x0", -1, false}}},
      {"brownian_dynamics", {{"beta", 1, false}, {"x0", -1, false}}},
      {"lorenz",
       {{"a1", 1, false},
        {"a2", 1, false},
        {"a3", 1, false},
        {"noise", 9, false},
        {"x0", 3, false}}},
      {"van_der_pol_additive",
       {{"gamma", 1, false},
        {"alpha", 1, false},
        {"beta", 1, false},
        {"theta", 1, false},
        {"noise_dim", 1, true},
        {"x0", 2, false}}},
      {"van_der_pol_multiplicative",
       {{"gamma", 1, false},
        {"alpha", 1, false},
        {"beta", 1, false},
        {"phi_slope", 1, false},
        {"noise_dim", 1, true},
        {"x0", 2, false}}},
      {"duffing_vdp",
       {{"a1", 1, false},
        {"a2", 1, false},
        {"a3", 1, false},
        {"phi_slope", 1, false},
        {"noise_dim", 1, true},
        {"x0", 2, false}}},
      {"lotka_volterra",
       {{"d", 1, true},
        {"m", 1, true},
        {"b", -1, false},
        {"a", -1, false},
        {"sigma", -1, false},
        {"x0", -1, false}}},
  };
  return specs;
}

const ModelSpec* find_model_spec(const std::string& name) {
  for (const ModelSpec& s : registry())
    if (name == s.name) return &s;
  return nullptr;
}

std::string joined_model_names() {
  std::string out;
  for (const ModelSpec& s : registry()) {
    if (!out.empty()) out += ", ";
    out += s.name;
  }
  return out;
}

/* componentwise double-well potential, V(q) = sum_i (q_i^2 - 1)^2 / 4 */
models::GradFn double_well_grad() {
  return [](std::span<const double> q, std::span<double> out) {
    for (std::size_t i = 0; i < q.size(); ++i)
      out[i] = q[i] * q[i] * q[i] - q[i];
  };
}

models::PotFn double_well_pot() {
  return [](std::span<const double> q) {
    double s = 0.0;
    for (double qi : q) {
      double w = qi * qi - 1.0;
      s += 0.25 * w * w;
    }
    return s;
  };
}

models::VecFn double_well_hess() {
  return [](std::span<const double> q, std::span<double> out) {
    std::size_t n = q.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      out[i * n + i] = 3.0 * q[i] * q[i] - 1.0;
  };
}

models::PhiFn scaled_row(double slope) {
  return [slope](double x1, std::span<double> row) {
    for (double& v : row) v = slope * x1;
  };
}

}  // namespace

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::Rate: return "rate";
    case Kind::Longtime: return "longtime";
    case Kind::Density: return "density";
    case Kind::Diagnostics: return "diagnostics";
  }
  fail(ErrorCode::Internal, "kind_name: bad kind");
}

Kind kind_from_name(const std::string& name) {
  if (name == "rate") return Kind::Rate;
  if (name == "longtime") return Kind::Longtime;
  if (name == "density") return Kind::Density;
  if (name == "diagnostics") return Kind::Diagnostics;
  fail(ErrorCode::Config,
       "config: unknown experiment kind '" + name +
           "' (valid: rate, longtime, density, diagnostics)");
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const ModelSpec& s : registry()) out.emplace_back(s.name);
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  Entries entries = tokenize(text);
  ExperimentConfig cfg;

  const Entry& kind = entries.require("experiment.kind");
  try {
    cfg.kind = kind_from_name(kind.value);
  } catch (const Error&) {
    bad(kind.line, "unknown experiment kind '" + kind.value +
                       "' (valid: rate, longtime, density, diagnostics)");
  }
  cfg.seed = parse_uint(entries.require("experiment.seed"), "experiment.seed");
  cfg.paths =
      parse_int(entries.require("experiment.paths"), "experiment.paths");
  const Entry& outdir = entries.require("experiment.output_dir");
  cfg.output_dir = outdir.value;
  if (cfg.paths < 1) bad("experiment.paths must be >= 1");

  const Entry& mname = entries.require("model.name");
  const ModelSpec* spec = find_model_spec(mname.value);
  if (!spec)
    bad(mname.line, "unknown model '" + mname.value +
                        "' (valid: " + joined_model_names() + ")");
  cfg.model = mname.value;
  for (const ParamSpec& p : spec->params) {
    std::string key = std::string("model.") + p.key;
    const Entry& e = entries.require(key);
    Vec values = parse_double_list(e, key);
    if (p.size >= 0 && static_cast<int>(values.size()) != p.size)
      bad(e.line, "'" + key + "' must have exactly " + fmt_int(p.size) +
                      (p.size == 1 ? " entry" : " entries"));
    if (values.empty()) bad(e.line, "'" + key + "' must be nonempty");
    if (p.integer)
      for (double v : values)
        if (v != std::floor(v) || std::fabs(v) > 1e15)
          bad(e.line, "'" + key + "' must be an integer");
    cfg.model_params[p.key] = std::move(values);
  }

  const Entry& sname = entries.require("scheme.name");
  try {
    cfg.scheme = schemes::scheme_from_name(sname.value);
  } catch (const Error&) {
    bad(sname.line, "unknown scheme '" + sname.value +
                        "' (valid: em, tamed_em, sitem, lv_milstein)");
  }
  if (const Entry* e = entries.find("scheme.delta")) {
    cfg.delta = parse_double(*e, "scheme.delta");
    if (!(cfg.delta >= 2.0)) bad(e->line, "scheme.delta must be >= 2");
  }
  if (const Entry* e = entries.find("scheme.gamma")) {
    cfg.gamma = parse_double(*e, "scheme.gamma");
    if (!(cfg.gamma > 1.0)) bad(e->line, "scheme.gamma must be > 1");
  }
  if (cfg.scheme == schemes::SchemeKind::LvMilstein &&
      cfg.model != "lotka_volterra")
    bad(sname.line, "scheme lv_milstein requires model lotka_volterra");

  switch (cfg.kind) {
    case Kind::Rate: {
      cfg.levels = parse_int_list(entries.require("rate.levels"), "rate.levels");
      cfg.ref_level = static_cast<int>(
          parse_int(entries.require("rate.ref_level"), "rate.ref_level"));
      cfg.r_order = parse_double(entries.require("rate.r"), "rate.r");
      cfg.horizon =
          parse_double(entries.require("rate.horizon"), "rate.horizon");
      if (cfg.levels.empty()) bad("rate.levels must be nonempty");
      for (int lv : cfg.levels)
        if (lv < 1 || lv > 40) bad("rate.levels entries must lie in 1..40");
      if (cfg.ref_level < 1 || cfg.ref_level > 40)
        bad("rate.ref_level must lie in 1..40");
      if (!(cfg.r_order > 0.0)) bad("rate.r must be positive");
      if (!(cfg.horizon > 0.0)) bad("rate.horizon must be positive");
      break;
    }
    case Kind::Longtime: {
      cfg.lt_h = parse_double(entries.require("longtime.h"), "longtime.h");
      cfg.lt_horizon =
          parse_double(entries.require("longtime.horizon"), "longtime.horizon");
      cfg.orders =
          parse_double_list(entries.require("longtime.orders"), "longtime.orders");
      cfg.record_dt = parse_double(entries.require("longtime.record_dt"),
                                   "longtime.record_dt");
      if (!(cfg.lt_h > 0.0)) bad("longtime.h must be positive");
      if (!(cfg.lt_horizon > 0.0)) bad("longtime.horizon must be positive");
      if (cfg.orders.empty()) bad("longtime.orders must be nonempty");
      for (double p : cfg.orders)
        if (!(p > 0.0)) bad("longtime.orders entries must be positive");
      if (!(cfg.record_dt > 0.0)) bad("longtime.record_dt must be positive");
      break;
    }
    case Kind::Density: {
      cfg.dn_h = parse_double(entries.require("density.h"), "density.h");
      cfg.t_burn =
          parse_double(entries.require("density.t_burn"), "density.t_burn");
      cfg.t_sample =
          parse_double(entries.require("density.t_sample"), "density.t_sample");
      cfg.bins = parse_int(entries.require("density.bins"), "density.bins");
      if (!(cfg.dn_h > 0.0)) bad("density.h must be positive");
      if (!(cfg.t_burn >= 0.0)) bad("density.t_burn must be >= 0");
      if (!(cfg.t_sample >= 1.0)) bad("density.t_sample must be >= 1");
      if (cfg.bins < 2) bad("density.bins must be >= 2");
      break;
    }
    case Kind::Diagnostics: {
      cfg.coarse_levels = parse_int_list(
          entries.require("diagnostics.coarse_levels"), "diagnostics.coarse_levels");
      cfg.fine_level = static_cast<int>(parse_int(
          entries.require("diagnostics.fine_level"), "diagnostics.fine_level"));
      cfg.p_order = parse_double(entries.require("diagnostics.p"), "diagnostics.p");
      cfg.q_order = parse_double(entries.require("diagnostics.q"), "diagnostics.q");
      cfg.z = parse_double(entries.require("diagnostics.z"), "diagnostics.z");
      cfg.epsilon =
          parse_double(entries.require("diagnostics.epsilon"), "diagnostics.epsilon");
      cfg.df_horizon =
          parse_double(entries.require("diagnostics.horizon"), "diagnostics.horizon");
      if (cfg.coarse_levels.empty())
        bad("diagnostics.coarse_levels must be nonempty");
      for (int lv : cfg.coarse_levels)
        if (lv < 1 || lv > 40)
          bad("diagnostics.coarse_levels entries must lie in 1..40");
      if (cfg.fine_level < 1 || cfg.fine_level > 40)
        bad("diagnostics.fine_level must lie in 1..40");
      if (!(cfg.p_order >= 2.0)) bad("diagnostics.p must be >= 2");
      if (!(cfg.q_order > 0.0)) bad("diagnostics.q must be positive");
      if (!(cfg.z >= 2.0)) bad("diagnostics.z must be >= 2");
      if (!(cfg.epsilon > 0.0)) bad("diagnostics.epsilon must be positive");
      if (!(cfg.df_horizon > 0.0)) bad("diagnostics.horizon must be positive");
      break;
    }
  }

  entries.finish();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "cannot read config file '" + path + "'");
  return parse_config(buf.str());
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto join_d = [](std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fmt_double(v[i]);
    }
    return s;
  };
  auto join_i = [](std::span<const int> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fmt_int(v[i]);
    }
    return s;
  };

  kv("experiment.kind", kind_name(cfg.kind));
  kv("experiment.output_dir", cfg.output_dir);
  kv("experiment.paths", fmt_int(cfg.paths));
  kv("experiment.seed", fmt_int(static_cast<std::int64_t>(cfg.seed)));
  kv("model.name", cfg.model);
  if (const ModelSpec* spec = find_model_spec(cfg.model))
    for (const ParamSpec& p : spec->params) {
      auto it = cfg.model_params.find(p.key);
      if (it != cfg.model_params.end())
        kv(std::string("model.") + p.key, join_d(it->second));
    }
  kv("scheme.name", schemes::scheme_name(cfg.scheme));
  kv("scheme.delta", fmt_double(cfg.delta));
  kv("scheme.gamma", fmt_double(cfg.gamma));
  switch (cfg.kind) {
    case Kind::Rate:
      kv("rate.levels", join_i(cfg.levels));
      kv("rate.ref_level", fmt_int(cfg.ref_level));
      kv("rate.r", fmt_double(cfg.r_order));
      kv("rate.horizon", fmt_double(cfg.horizon));
      break;
    case Kind::Longtime:
      kv("longtime.h", fmt_double(cfg.lt_h));
      kv("longtime.horizon", fmt_double(cfg.lt_horizon));
      kv("longtime.orders", join_d(cfg.orders));
      kv("longtime.record_dt", fmt_double(cfg.record_dt));
      break;
    case Kind::Density:
      kv("density.h", fmt_double(cfg.dn_h));
      kv("density.t_burn", fmt_double(cfg.t_burn));
      kv("density.t_sample", fmt_double(cfg.t_sample));
      kv("density.bins", fmt_int(cfg.bins));
      break;
    case Kind::Diagnostics:
      kv("diagnostics.coarse_levels", join_i(cfg.coarse_levels));
      kv("diagnostics.fine_level", fmt_int(cfg.fine_level));
      kv("diagnostics.p", fmt_double(cfg.p_order));
      kv("diagnostics.q", fmt_double(cfg.q_order));
      kv("diagnostics.z", fmt_double(cfg.z));
      kv("diagnostics.epsilon", fmt_double(cfg.epsilon));
      kv("diagnostics.horizon", fmt_double(cfg.df_horizon));
      break;
  }
  return out;
}

ExperimentConfig with_override(const ExperimentConfig& cfg,
                               const std::string& key,
                               const std::string& value) {
  std::string text = serialize(cfg);
  std::string rebuilt;
  bool replaced = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl - pos);
    pos = (nl == std::string::npos) ? text.size() : nl + 1;
    if (line.rfind(key + " = ", 0) == 0) {
      line = key + " = " + value;
      replaced = true;
    }
    rebuilt += line;
    rebuilt += '\n';
  }
  if (!replaced) rebuilt += key + " = " + value + "\n";
  return parse_config(rebuilt);
}

models::SdeModel build_model(const ExperimentConfig& cfg) {
  const auto& mp = cfg.model_params;
  auto scalar = [&mp](const char* k) { return mp.at(k).at(0); };
  auto list = [&mp](const char* k) { return mp.at(k); };

  if (cfg.model == "gbm")
    return models::gbm(scalar("mu"), scalar("sigma"), scalar("x0"));
  if (cfg.model == "langevin") {
    Vec x0 = list("x0");
    if (x0.size() % 2 != 0)
      bad("model.x0 for langevin must pair positions with momenta");
    return models::langevin(double_well_grad(), double_well_pot(),
                            scalar("gamma"), scalar("beta"), x0,
                            double_well_hess());
  }
  if (cfg.model == "brownian_dynamics")
    return models::brownian_dynamics(double_well_grad(), double_well_pot(),
                                     scalar("beta"), list("x0"),
                                     double_well_hess());
  if (cfg.model == "lorenz")
    return models::lorenz_additive(scalar("a1"), scalar("a2"), scalar("a3"),
                                   list("noise"), list("x0"));
  if (cfg.model == "van_der_pol_additive")
    return models::van_der_pol_additive(
        scalar("gamma"), scalar("alpha"), scalar("beta"), scalar("theta"),
        static_cast<int>(scalar("noise_dim")), list("x0"));
  if (cfg.model == "van_der_pol_multiplicative")
    return models::van_der_pol(scalar("gamma"), scalar("alpha"),
                               scalar("beta"), scaled_row(scalar("phi_slope")),
                               static_cast<int>(scalar("noise_dim")),
                               list("x0"));
  if (cfg.model == "duffing_vdp")
    return models::duffing_van_der_pol(
        scalar("a1"), scalar("a2"), scalar("a3"),
        scaled_row(scalar("phi_slope")),
        static_cast<int>(scalar("noise_dim")), list("x0"));
  if (cfg.model == "lotka_volterra") {
    models::LvCoefficients c;
    c.d = static_cast<int>(scalar("d"));
    c.m = static_cast<int>(scalar("m"));
    c.b = list("b");
    c.A = list("a");
    c.sigma = list("sigma");
    if (c.d < 1 || c.m < 1) bad("model.d and model.m must be >= 1");
    auto expect = [](const Vec& v, std::int64_t n, const char* key) {
      if (static_cast<std::int64_t>(v.size()) != n)
        bad(std::string("model.") + key + " must have " + fmt_int(n) +
            " entries");
    };
    expect(c.b, c.d, "b");
    expect(c.A, static_cast<std::int64_t>(c.d) * c.d, "a");
    expect(c.sigma, static_cast<std::int64_t>(c.d) * c.m, "sigma");
    Vec x0 = list("x0");
    expect(x0, c.d, "x0");
    return models::lotka_volterra(c, x0);
  }
  fail(ErrorCode::Internal, "build_model: unvalidated model name");
}

schemes::SchemeParams scheme_params(const ExperimentConfig& cfg) {
  schemes::SchemeParams params;
  params.taming = taming::TamingParams{cfg.delta};
  params.lv_gamma = cfg.gamma;
  return params;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::Config:
    case ErrorCode::Unsupported:
      return 2;
    case ErrorCode::Divergence:
      return 3;
    case ErrorCode::Io:
    case ErrorCode::Internal:
      return 4;
  }
  return 4;
}

}  // namespace sdekit::experiment
