#include "accbo/harness/config.hpp"

#include <cmath>

#include "accbo/core/errors.hpp"
#include "accbo/harness/io.hpp"

namespace accbo::harness {

using core::Json;
using core::JsonObjectReader;

std::string to_string(Command c) {
  switch (c) {
    case Command::snag_track: return "snag-track";
    case Command::bias: return "bias";
    case Command::accbo: return "accbo";
    case Command::sweep: return "sweep";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  if (name == "snag-track") return Command::snag_track;
  if (name == "bias") return Command::bias;
  if (name == "accbo") return Command::accbo;
  if (name == "sweep") return Command::sweep;
  throw ConstraintViolation("unknown command '" + name + "'");
}

std::string to_string(BetaRule r) {
  switch (r) {
    case BetaRule::none: return "none";
    case BetaRule::tracking: return "tracking";
    case BetaRule::variance: return "variance";
  }
  return "unknown";
}

BetaRule beta_rule_from_string(const std::string& name) {
  if (name == "none") return BetaRule::none;
  if (name == "tracking") return BetaRule::tracking;
  if (name == "variance") return BetaRule::variance;
  throw ConstraintViolation("unknown beta rule '" + name + "'");
}

std::string to_string(Algorithm a) { return a == Algorithm::accbo ? "accbo" : "plain_momentum"; }

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "accbo") return Algorithm::accbo;
  if (name == "plain_momentum") return Algorithm::plain_momentum;
  throw ConstraintViolation("unknown algorithm '" + name + "'");
}

std::vector<std::uint64_t> SeedConfig::resolve() const {
  if (list) return *list;
  std::vector<std::uint64_t> out;
  for (std::int64_t k = 0; k < count; ++k) out.push_back(base + static_cast<std::uint64_t>(k));
  return out;
}

namespace {

// Runs `fn` and rewraps a ConstraintViolation from an enum parser as a
// ConfigError on `path`.
template <class Fn>
auto parse_at(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ConstraintViolation& e) {
    core::config_error(path, e.what());
  }
}

template <class T, class Fn>
std::vector<T> read_list(const Json& node, const std::string& path, Fn&& item) {
  if (!node.is_array()) core::config_error(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i) out.push_back(item(node[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> read_doubles(const Json& node, const std::string& path) {
  return read_list<double>(node, path, [](const Json& n, const std::string& p) { return core::json_to_double(n, p); });
}

std::vector<std::string> read_strings(const Json& node, const std::string& path) {
  return read_list<std::string>(node, path, [](const Json& n, const std::string& p) {
    if (!n.is_string()) core::config_error(p, "expected a string");
    return n.get<std::string>();
  });
}

SeedConfig read_seeds(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  SeedConfig s;
  if (const Json* list = r.optional_node("list")) {
    s.list = read_list<std::uint64_t>(*list, r.path_of("list"), [](const Json& n, const std::string& p) {
      if (n.is_number_unsigned()) return n.get<std::uint64_t>();
      if (n.is_number_integer() && n.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(n.get<std::int64_t>());
      core::config_error(p, "expected a nonnegative integer");
    });
    if (s.list->empty()) core::config_error(r.path_of("list"), "seed list must not be empty");
    if (r.has("base") || r.has("count")) core::config_error(path, "give either 'list' or 'base'/'count'");
  }
  if (auto b = r.optional_u64("base")) s.base = *b;
  if (auto c = r.optional_int("count")) s.count = *c;
  if (s.count < 1) core::config_error(r.path_of("count"), "seed count must be at least 1");
  r.finish();
  return s;
}

Json seeds_to_json(const SeedConfig& s) {
  Json out = Json::object();
  if (s.list) {
    out["list"] = *s.list;
  } else {
    out["base"] = s.base;
    out["count"] = s.count;
  }
  return out;
}

core::ScheduleOverrides read_overrides(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  core::ScheduleOverrides o;
  o.one_minus_beta = r.optional_double("one_minus_beta");
  o.alpha = r.optional_double("alpha");
  o.alpha_init = r.optional_double("alpha_init");
  o.eta = r.optional_double("eta");
  o.tau = r.optional_double("tau");
  o.T = r.optional_int("T");
  o.T0 = r.optional_int("T0");
  o.I = r.optional_int("I");
  o.N = r.optional_int("N");
  o.S = r.optional_int("S");
  o.Q = r.optional_int("Q");
  r.finish();
  return o;
}

Json overrides_to_json(const core::ScheduleOverrides& o) {
  Json out = Json::object();
  auto put = [&out](const char* key, const auto& v) {
    if (v) out[key] = *v;
  };
  put("one_minus_beta", o.one_minus_beta);
  put("alpha", o.alpha);
  put("alpha_init", o.alpha_init);
  put("eta", o.eta);
  put("tau", o.tau);
  put("T", o.T);
  put("T0", o.T0);
  put("I", o.I);
  put("N", o.N);
  put("S", o.S);
  put("Q", o.Q);
  return out;
}

ScheduleConfig read_schedule(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  ScheduleConfig s;
  if (auto m = r.optional_string("mode"))
    s.mode = parse_at(r.path_of("mode"), [&] { return core::schedule_mode_from_string(*m); });
  if (auto v = r.optional_double("epsilon")) s.epsilon = *v;
  if (auto v = r.optional_double("delta")) s.delta = *v;
  if (auto v = r.optional_double("sigma_tilde_g1")) s.sigma_tilde_g1 = *v;
  if (auto b = r.optional_string("beta_rule"))
    s.beta_rule = parse_at(r.path_of("beta_rule"), [&] { return beta_rule_from_string(*b); });
  if (auto v = r.optional_double("beta_constant")) s.beta_constant = *v;
  if (auto v = r.optional_double("T_multiple")) s.T_multiple = *v;
  s.lower_noise = r.optional_double("lower_noise");
  if (const Json* o = r.optional_node("overrides")) s.overrides = read_overrides(*o, r.path_of("overrides"));
  r.finish();
  if (!(s.epsilon > 0.0)) core::config_error(r.path_of("epsilon"), "must be positive");
  if (!(s.delta > 0.0 && s.delta < 1.0)) core::config_error(r.path_of("delta"), "must lie in (0, 1)");
  if (!(s.sigma_tilde_g1 > 0.0)) core::config_error(r.path_of("sigma_tilde_g1"), "must be positive");
  if (!(s.beta_constant > 0.0)) core::config_error(r.path_of("beta_constant"), "must be positive");
  if (!(s.T_multiple >= 1.0)) core::config_error(r.path_of("T_multiple"), "must be at least 1");
  if (s.lower_noise && !(*s.lower_noise >= 0.0)) core::config_error(r.path_of("lower_noise"), "must be nonnegative");
  return s;
}

Json schedule_to_json(const ScheduleConfig& s) {
  Json out;
  out["mode"] = core::to_string(s.mode);
  out["epsilon"] = s.epsilon;
  out["delta"] = s.delta;
  out["sigma_tilde_g1"] = s.sigma_tilde_g1;
  out["beta_rule"] = to_string(s.beta_rule);
  out["beta_constant"] = s.beta_constant;
  out["T_multiple"] = s.T_multiple;
  if (s.lower_noise) out["lower_noise"] = *s.lower_noise;
  out["overrides"] = overrides_to_json(s.overrides);
  return out;
}

BaselineConfig read_baseline(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  BaselineConfig b;
  b.lower_step = r.optional_double("lower_step");
  b.eta = r.optional_double("eta");
  r.finish();
  if (b.lower_step && !(*b.lower_step > 0.0)) core::config_error(r.path_of("lower_step"), "must be positive");
  if (b.eta && !(*b.eta > 0.0)) core::config_error(r.path_of("eta"), "must be positive");
  return b;
}

Json baseline_to_json(const BaselineConfig& b) {
  Json out = Json::object();
  if (b.lower_step) out["lower_step"] = *b.lower_step;
  if (b.eta) out["eta"] = *b.eta;
  return out;
}

DriftConfig read_drift(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  DriftConfig d;
  const std::string kind = r.required_string("kind");
  d.kind = parse_at(r.path_of("kind"), [&] { return snag::drift_kind_from_string(kind); });
  if (d.kind == snag::DriftKind::external) core::config_error(r.path_of("kind"), "external drift is not configurable");
  if (auto v = r.optional_double("delta")) d.delta = *v;
  if (const Json* dir = r.optional_node("direction")) d.direction = read_doubles(*dir, r.path_of("direction"));
  r.finish();
  if (!(d.delta >= 0.0)) core::config_error(r.path_of("delta"), "must be nonnegative");
  if (d.kind == snag::DriftKind::fixed_direction && !d.direction)
    core::config_error(r.path_of("direction"), "missing required field");
  return d;
}

Json drift_to_json(const DriftConfig& d) {
  Json out;
  out["kind"] = snag::to_string(d.kind);
  out["delta"] = d.delta;
  if (d.direction) out["direction"] = *d.direction;
  return out;
}

TrackConfig read_track(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  TrackConfig t;
  if (auto v = r.optional_string("family")) t.family = *v;
  if (t.family != "isotropic" && t.family != "anisotropic")
    core::config_error(r.path_of("family"), "expected 'isotropic' or 'anisotropic'");
  if (auto v = r.optional_int("dim")) t.dim = *v;
  if (auto v = r.optional_double("mu")) t.mu = *v;
  if (auto v = r.optional_double("L")) t.L = *v;
  t.alpha = r.required_double("alpha");
  t.T = r.required_int("T");
  if (auto v = r.optional_double("delta")) t.delta = *v;
  if (const Json* s = r.optional_node("sigmas")) t.sigmas = read_doubles(*s, r.path_of("sigmas"));
  if (const Json* d = r.optional_node("drifts")) {
    t.drifts = read_list<DriftConfig>(*d, r.path_of("drifts"), read_drift);
  }
  if (const Json* w = r.optional_node("w0")) t.w0 = read_doubles(*w, r.path_of("w0"));
  if (auto v = r.optional_int("mc_runs")) t.mc_runs = *v;
  r.finish();
  if (t.dim < 1) core::config_error(r.path_of("dim"), "must be at least 1");
  if (t.T < 1) core::config_error(r.path_of("T"), "must be at least 1");
  if (t.sigmas.empty()) core::config_error(r.path_of("sigmas"), "must not be empty");
  if (t.drifts.empty()) core::config_error(r.path_of("drifts"), "must not be empty");
  for (std::size_t i = 0; i < t.sigmas.size(); ++i)
    if (!(t.sigmas[i] >= 0.0)) core::config_error(r.path_of("sigmas") + "[" + std::to_string(i) + "]", "must be nonnegative");
  if (t.w0 && static_cast<std::int64_t>(t.w0->size()) != t.dim)
    core::config_error(r.path_of("w0"), "length must equal dim");
  if (t.mc_runs < 100) core::config_error(r.path_of("mc_runs"), "must be at least 100");
  return t;
}

Json track_to_json(const TrackConfig& t) {
  Json out;
  out["family"] = t.family;
  out["dim"] = t.dim;
  out["mu"] = t.mu;
  out["L"] = t.L;
  out["alpha"] = t.alpha;
  out["T"] = t.T;
  out["delta"] = t.delta;
  out["sigmas"] = t.sigmas;
  out["drifts"] = Json::array();
  for (const auto& d : t.drifts) out["drifts"].push_back(drift_to_json(d));
  if (t.w0) out["w0"] = *t.w0;
  out["mc_runs"] = t.mc_runs;
  return out;
}

BiasConfig read_bias(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  BiasConfig b;
  if (const Json* x = r.optional_node("x")) b.x = read_doubles(*x, r.path_of("x"));
  if (const Json* q = r.optional_node("Q")) {
    b.Q = read_list<std::int64_t>(*q, r.path_of("Q"), core::json_to_int);
  }
  if (auto v = r.optional_int("S")) b.S = *v;
  if (auto v = r.optional_int("samples")) b.samples = *v;
  if (auto v = r.optional_double("variance_slack")) b.variance_slack = *v;
  r.finish();
  if (b.Q.empty()) core::config_error(r.path_of("Q"), "must not be empty");
  for (std::size_t i = 0; i < b.Q.size(); ++i)
    if (b.Q[i] < 1) core::config_error(r.path_of("Q") + "[" + std::to_string(i) + "]", "must be at least 1");
  if (b.S < 1) core::config_error(r.path_of("S"), "must be at least 1");
  if (b.samples < 1000) core::config_error(r.path_of("samples"), "must be at least 1000");
  if (!(b.variance_slack >= 1.0)) core::config_error(r.path_of("variance_slack"), "must be at least 1");
  return b;
}

Json bias_to_json(const BiasConfig& b) {
  Json out;
  if (b.x) out["x"] = *b.x;
  out["Q"] = b.Q;
  out["S"] = b.S;
  out["samples"] = b.samples;
  out["variance_slack"] = b.variance_slack;
  return out;
}

std::vector<optimizer::LowerOption> read_options(const Json& node, const std::string& path) {
  const auto names = read_strings(node, path);
  std::vector<optimizer::LowerOption> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out.push_back(parse_at(path + "[" + std::to_string(i) + "]",
                           [&] { return optimizer::lower_option_from_string(names[i]); }));
  }
  return out;
}

RunConfig read_run(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  RunConfig c;
  if (auto a = r.optional_string("algorithm"))
    c.algorithm = parse_at(r.path_of("algorithm"), [&] { return algorithm_from_string(*a); });
  if (auto o = r.optional_string("option"))
    c.option = parse_at(r.path_of("option"), [&] { return optimizer::lower_option_from_string(*o); });
  c.x0 = read_doubles(r.required_node("x0"), r.path_of("x0"));
  if (auto v = r.optional_bool("stop_at_target")) c.stop_at_target = *v;
  if (auto v = r.optional_double("target_multiple")) c.target_multiple = *v;
  if (auto v = r.optional_int("log_every")) c.log_every = *v;
  if (const Json* b = r.optional_node("baseline")) c.baseline = read_baseline(*b, r.path_of("baseline"));
  r.finish();
  if (!(c.target_multiple > 0.0)) core::config_error(r.path_of("target_multiple"), "must be positive");
  if (c.log_every < 1) core::config_error(r.path_of("log_every"), "must be at least 1");
  return c;
}

Json run_to_json(const RunConfig& c) {
  Json out;
  out["algorithm"] = to_string(c.algorithm);
  out["option"] = optimizer::to_string(c.option);
  out["x0"] = c.x0;
  out["stop_at_target"] = c.stop_at_target;
  out["target_multiple"] = c.target_multiple;
  out["log_every"] = c.log_every;
  out["baseline"] = baseline_to_json(c.baseline);
  return out;
}

SweepConfig read_sweep(const Json& node, const std::string& path) {
  JsonObjectReader r(node, path);
  SweepConfig c;
  c.epsilons = read_doubles(r.required_node("epsilons"), r.path_of("epsilons"));
  if (const Json* a = r.optional_node("algorithms")) {
    const auto names = read_strings(*a, r.path_of("algorithms"));
    c.algorithms.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      c.algorithms.push_back(parse_at(r.path_of("algorithms") + "[" + std::to_string(i) + "]",
                                      [&] { return algorithm_from_string(names[i]); }));
    }
  }
  if (const Json* o = r.optional_node("options")) c.options = read_options(*o, r.path_of("options"));
  c.x0 = read_doubles(r.required_node("x0"), r.path_of("x0"));
  if (auto v = r.optional_double("target_multiple")) c.target_multiple = *v;
  if (const Json* b = r.optional_node("baseline")) c.baseline = read_baseline(*b, r.path_of("baseline"));
  r.finish();
  if (c.epsilons.empty()) core::config_error(r.path_of("epsilons"), "must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    if (!(c.epsilons[i] > 0.0))
      core::config_error(r.path_of("epsilons") + "[" + std::to_string(i) + "]", "must be positive");
  if (c.algorithms.empty()) core::config_error(r.path_of("algorithms"), "must not be empty");
  if (c.options.empty()) core::config_error(r.path_of("options"), "must not be empty");
  if (!(c.target_multiple > 0.0)) core::config_error(r.path_of("target_multiple"), "must be positive");
  return c;
}

Json sweep_to_json(const SweepConfig& c) {
  Json out;
  out["epsilons"] = c.epsilons;
  out["algorithms"] = Json::array();
  for (auto a : c.algorithms) out["algorithms"].push_back(to_string(a));
  out["options"] = Json::array();
  for (auto o : c.options) out["options"].push_back(optimizer::to_string(o));
  out["x0"] = c.x0;
  out["target_multiple"] = c.target_multiple;
  out["baseline"] = baseline_to_json(c.baseline);
  return out;
}

const char* section_key(Command c) {
  switch (c) {
    case Command::snag_track: return "snag_track";
    case Command::bias: return "bias";
    case Command::accbo: return "run";
    case Command::sweep: return "sweep";
  }
  return "";
}

}  // namespace

ExperimentConfig config_from_json(const Json& node, const std::filesystem::path& base_dir,
                                  std::optional<Command> expected) {
  JsonObjectReader r(node, "");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (auto command = r.optional_string("command")) {
    cfg.command = parse_at("command", [&] { return command_from_string(*command); });
    if (expected && *expected != cfg.command)
      core::config_error("command", "config is for '" + *command + "', not '" + to_string(*expected) + "'");
  } else if (expected) {
    cfg.command = *expected;
  } else {
    core::config_error("command", "missing required field");
  }
  if (const Json* s = r.optional_node("seeds")) cfg.seeds = read_seeds(*s, "seeds");
  if (auto t = r.optional_int("threads")) {
    if (*t < 1 || *t > 1024) core::config_error("threads", "must lie in [1, 1024]");
    cfg.threads = static_cast<int>(*t);
  }
  if (const Json* i = r.optional_node("instance")) cfg.instance = *i;
  cfg.instance_file = r.optional_string("instance_file");
  if (cfg.instance && cfg.instance_file) core::config_error("instance", "give either 'instance' or 'instance_file'");
  if (const Json* s = r.optional_node("schedule")) cfg.schedule = read_schedule(*s, "schedule");

  const std::string key = section_key(cfg.command);
  const Json& section = r.required_node(key);
  switch (cfg.command) {
    case Command::snag_track: cfg.track = read_track(section, key); break;
    case Command::bias: cfg.bias = read_bias(section, key); break;
    case Command::accbo: cfg.run = read_run(section, key); break;
    case Command::sweep: cfg.sweep = read_sweep(section, key); break;
  }
  r.finish();
  validate_config(cfg);
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json out;
  out["command"] = to_string(cfg.command);
  out["seeds"] = seeds_to_json(cfg.seeds);
  out["threads"] = cfg.threads;
  if (cfg.instance) out["instance"] = *cfg.instance;
  if (cfg.instance_file) out["instance_file"] = *cfg.instance_file;
  out["schedule"] = schedule_to_json(cfg.schedule);
  if (cfg.track) out["snag_track"] = track_to_json(*cfg.track);
  if (cfg.bias) out["bias"] = bias_to_json(*cfg.bias);
  if (cfg.run) out["run"] = run_to_json(*cfg.run);
  if (cfg.sweep) out["sweep"] = sweep_to_json(*cfg.sweep);
  return out;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Command> expected) {
  return config_from_json(read_json_file(path), path.parent_path(), expected);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.seeds.list) {
    if (cfg.seeds.list->empty()) core::config_error("seeds.list", "seed list must not be empty");
  } else if (cfg.seeds.count < 1) {
    core::config_error("seeds.count", "seed count must be at least 1");
  }
  if (cfg.command != Command::snag_track && !cfg.instance && !cfg.instance_file)
    core::config_error("instance", "missing required field");
  if (cfg.instance_file) {
    const auto p = cfg.base_dir / *cfg.instance_file;
    if (!std::filesystem::exists(p)) core::config_error("instance_file", "file '" + p.string() + "' does not exist");
  }
  if (!(cfg.schedule.epsilon > 0.0)) core::config_error("schedule.epsilon", "must be positive");
  const bool needs_section[] = {cfg.command == Command::snag_track && !cfg.track,
                                cfg.command == Command::bias && !cfg.bias,
                                cfg.command == Command::accbo && !cfg.run,
                                cfg.command == Command::sweep && !cfg.sweep};
  for (bool missing : needs_section)
    if (missing) core::config_error(section_key(cfg.command), "missing required field");
}

}  // namespace accbo::harness
