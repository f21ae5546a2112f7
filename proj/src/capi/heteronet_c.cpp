#include "heteronet/heteronet.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "baselines.hpp"
#include "config.hpp"
#include "env.hpp"
#include "harness.hpp"
#include "mappo.hpp"
#include "scenario.hpp"

namespace {

thread_local std::string g_last_error;

hn_status fail(hn_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

// Maps core exceptions onto the C status codes.
template <typename Fn>
hn_status guard(Fn&& fn) {
  try {
    fn();
    return HN_OK;
  } catch (const std::invalid_argument& e) {
    return fail(HN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::logic_error& e) {
    return fail(HN_ERR_STATE, e.what());
  } catch (const std::runtime_error& e) {
    return fail(HN_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(HN_ERR_INTERNAL, e.what());
  }
}

hn_status require(bool ok, const char* msg) {
  return ok ? HN_OK : fail(HN_ERR_INVALID_ARGUMENT, msg);
}

}  // namespace

struct hn_config {
  hnet::ScenarioConfig cfg;
};

struct hn_scenario {
  hnet::Scenario scenario;
};

struct hn_env {
  explicit hn_env(hnet::Scenario s) : env(std::move(s)) {}
  hnet::Env env;
  hnet::StepResult current;
  bool live = false;  // true once reset() has been called
};

struct hn_train_config {
  hnet::TrainConfig cfg;
};

extern "C" {

const char* hn_status_string(hn_status status) {
  switch (status) {
    case HN_OK: return "ok";
    case HN_ERR_INVALID_ARGUMENT: return "invalid argument";
    case HN_ERR_STATE: return "invalid state";
    case HN_ERR_IO: return "i/o error";
    case HN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* hn_last_error(void) { return g_last_error.c_str(); }

void hn_string_free(char* s) { delete[] s; }

hn_status hn_config_create(hn_config** out) {
  if (auto s = require(out != nullptr, "out is NULL")) return s;
  *out = new hn_config{};
  return HN_OK;
}

hn_status hn_config_from_json(const char* json, hn_config** out) {
  if (auto s = require(json && out, "json/out is NULL")) return s;
  return guard([&] { *out = new hn_config{hnet::scenario_config_from_json(json)}; });
}

hn_status hn_config_load(const char* path, hn_config** out) {
  if (auto s = require(path && out, "path/out is NULL")) return s;
  return guard([&] { *out = new hn_config{hnet::load_scenario_config(path)}; });
}

hn_status hn_config_to_json(const hn_config* cfg, char** json_out) {
  if (auto s = require(cfg && json_out, "cfg/json_out is NULL")) return s;
  return guard([&] {
    const std::string text = hnet::to_json(cfg->cfg);
    *json_out = new char[text.size() + 1];
    std::memcpy(*json_out, text.c_str(), text.size() + 1);
  });
}

hn_status hn_config_save(const hn_config* cfg, const char* path) {
  if (auto s = require(cfg && path, "cfg/path is NULL")) return s;
  return guard([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(std::string("cannot write: ") + path);
    out << hnet::to_json(cfg->cfg) << "\n";
  });
}

void hn_config_destroy(hn_config* cfg) { delete cfg; }

hn_status hn_scenario_generate(const hn_config* cfg, uint64_t seed,
                               hn_scenario** out) {
  if (auto s = require(cfg && out, "cfg/out is NULL")) return s;
  return guard([&] {
    hnet::ScenarioConfig c = cfg->cfg;
    c.rng_seed = seed;
    *out = new hn_scenario{hnet::generate_scenario(c)};
  });
}

hn_status hn_scenario_load(const char* path, hn_scenario** out) {
  if (auto s = require(path && out, "path/out is NULL")) return s;
  return guard([&] { *out = new hn_scenario{hnet::load_scenario(path)}; });
}

hn_status hn_scenario_save(const hn_scenario* s, const char* path) {
  if (auto st = require(s && path, "scenario/path is NULL")) return st;
  return guard([&] { hnet::save_scenario(s->scenario, path); });
}

hn_status hn_scenario_counts(const hn_scenario* s, int* num_devices,
                             int* num_uavs) {
  if (auto st = require(s != nullptr, "scenario is NULL")) return st;
  if (num_devices) *num_devices = static_cast<int>(s->scenario.devices.size());
  if (num_uavs) *num_uavs = static_cast<int>(s->scenario.uavs.size());
  return HN_OK;
}

void hn_scenario_destroy(hn_scenario* s) { delete s; }

hn_status hn_env_create(const hn_scenario* s, hn_env** out) {
  if (auto st = require(s && out, "scenario/out is NULL")) return st;
  return guard([&] { *out = new hn_env(s->scenario); });
}

void hn_env_destroy(hn_env* env) { delete env; }

hn_status hn_env_num_agents(const hn_env* env, int* out) {
  if (auto st = require(env && out, "env/out is NULL")) return st;
  *out = env->env.num_agents();
  return HN_OK;
}

hn_status hn_env_cluster_size(const hn_env* env, int agent, size_t* out) {
  if (auto st = require(env && out, "env/out is NULL")) return st;
  if (auto st = require(agent >= 0 && agent < env->env.num_agents(),
                        "agent index out of range"))
    return st;
  *out = env->env.cluster_members(agent).size();
  return HN_OK;
}

hn_status hn_env_obs_dim(const hn_env* env, int agent, size_t* out) {
  if (auto st = require(env && out, "env/out is NULL")) return st;
  if (auto st = require(agent >= 0 && agent < env->env.num_agents(),
                        "agent index out of range"))
    return st;
  *out = env->env.obs_dim(agent);
  return HN_OK;
}

hn_status hn_env_reset(hn_env* env, uint64_t seed) {
  if (auto st = require(env != nullptr, "env is NULL")) return st;
  return guard([&] {
    env->current = env->env.reset(seed);
    env->live = true;
  });
}

hn_status hn_env_observation(const hn_env* env, int agent, double* buf,
                             size_t len) {
  if (auto st = require(env && buf, "env/buf is NULL")) return st;
  if (!env->live) return fail(HN_ERR_STATE, "environment not reset yet");
  if (auto st = require(agent >= 0 && agent < env->env.num_agents(),
                        "agent index out of range"))
    return st;
  const auto& obs = env->current.observations[agent];
  if (len != obs.size())
    return fail(HN_ERR_INVALID_ARGUMENT, "observation buffer length mismatch");
  std::memcpy(buf, obs.data(), len * sizeof(double));
  return HN_OK;
}

hn_status hn_env_step(hn_env* env, const double* move_deltas,
                      const int* sf_choices, const int* power_choices,
                      double* rewards_out, double* global_ee_out,
                      int* done_out) {
  if (auto st = require(env && move_deltas && sf_choices && power_choices,
                        "env/action arrays are NULL"))
    return st;
  if (!env->live) return fail(HN_ERR_STATE, "environment not reset yet");
  return guard([&] {
    std::vector<hnet::ActionCommand> actions;
    std::size_t dev_off = 0;
    for (int u = 0; u < env->env.num_agents(); ++u) {
      hnet::ActionCommand a;
      for (int i = 0; i < 3; ++i) a.move_delta[i] = move_deltas[3 * u + i];
      const std::size_t n = env->env.cluster_members(u).size();
      a.sf_choice.assign(sf_choices + dev_off, sf_choices + dev_off + n);
      a.power_choice.assign(power_choices + dev_off, power_choices + dev_off + n);
      dev_off += n;
      actions.push_back(std::move(a));
    }
    env->current = env->env.step(actions);
    if (rewards_out)
      std::memcpy(rewards_out, env->current.rewards.data(),
                  env->current.rewards.size() * sizeof(double));
    if (global_ee_out) *global_ee_out = env->current.info.global_ee;
    if (done_out) *done_out = env->current.done ? 1 : 0;
  });
}

hn_status hn_train_config_create(hn_train_config** out) {
  if (auto st = require(out != nullptr, "out is NULL")) return st;
  *out = new hn_train_config{};
  return HN_OK;
}

hn_status hn_train_config_from_json(const char* json, hn_train_config** out) {
  if (auto st = require(json && out, "json/out is NULL")) return st;
  return guard(
      [&] { *out = new hn_train_config{hnet::train_config_from_json(json)}; });
}

hn_status hn_train_config_load(const char* path, hn_train_config** out) {
  if (auto st = require(path && out, "path/out is NULL")) return st;
  return guard([&] {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open: ") + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    *out = new hn_train_config{hnet::train_config_from_json(ss.str())};
  });
}

hn_status hn_train_config_to_json(const hn_train_config* cfg, char** json_out) {
  if (auto st = require(cfg && json_out, "cfg/json_out is NULL")) return st;
  return guard([&] {
    const std::string text = hnet::to_json(cfg->cfg);
    *json_out = new char[text.size() + 1];
    std::memcpy(*json_out, text.c_str(), text.size() + 1);
  });
}

void hn_train_config_destroy(hn_train_config* cfg) { delete cfg; }

hn_status hn_run_experiment(const hn_config* cfg,
                            const hn_train_config* train_cfg,
                            const char* preset, const uint64_t* seeds,
                            size_t num_seeds, const char* out_root,
                            int eval_episodes, double* mean_ee_out) {
  if (auto st = require(cfg && preset && seeds && out_root,
                        "cfg/preset/seeds/out_root is NULL"))
    return st;
  if (auto st = require(num_seeds > 0, "num_seeds must be positive")) return st;
  return guard([&] {
    const hnet::TrainConfig tc = train_cfg ? train_cfg->cfg : hnet::TrainConfig{};
    const std::vector<std::uint64_t> seed_vec(seeds, seeds + num_seeds);
    const auto outcome = hnet::run_experiment(preset, seed_vec, cfg->cfg, tc,
                                              out_root, eval_episodes);
    if (mean_ee_out) *mean_ee_out = outcome.mean_ee;
  });
}

hn_status hn_evaluate_checkpoint(const hn_config* cfg,
                                 const hn_train_config* train_cfg,
                                 const char* checkpoint_path,
                                 const char* preset, uint64_t seed,
                                 int episodes, const char* trace_path,
                                 double* mean_ee_out) {
  if (auto st = require(cfg && checkpoint_path && preset,
                        "cfg/checkpoint/preset is NULL"))
    return st;
  return guard([&] {
    const hnet::TrainConfig tc = train_cfg ? train_cfg->cfg : hnet::TrainConfig{};
    hnet::ScenarioConfig sc =
        hnet::apply_preset(cfg->cfg, hnet::parse_preset(preset));
    sc.rng_seed = seed;
    hnet::Env env(hnet::generate_scenario(sc));
    const auto actors = hnet::actors_from_checkpoint(
        hnet::load_checkpoint(checkpoint_path), env, tc.hidden_size);
    std::ofstream trace;
    if (trace_path) {
      trace.open(trace_path, std::ios::binary);
      if (!trace)
        throw std::runtime_error(std::string("cannot write: ") + trace_path);
    }
    const auto summary = hnet::evaluate_actors(
        env, actors, episodes, seed, trace_path ? &trace : nullptr);
    if (mean_ee_out) *mean_ee_out = summary.mean_ee;
  });
}

hn_status hn_baseline_eval(const hn_config* cfg, const char* kind,
                           uint64_t seed, int episodes, const char* trace_path,
                           double* mean_ee_out) {
  if (auto st = require(cfg && kind, "cfg/kind is NULL")) return st;
  return guard([&] {
    hnet::ScenarioConfig sc = cfg->cfg;
    sc.rng_seed = seed;
    const hnet::Scenario scenario = hnet::generate_scenario(sc);
    std::ofstream trace;
    if (trace_path) {
      trace.open(trace_path, std::ios::binary);
      if (!trace)
        throw std::runtime_error(std::string("cannot write: ") + trace_path);
    }
    std::ostream* tr = trace_path ? &trace : nullptr;
    hnet::EvalSummary summary;
    if (std::string(kind) == "random") {
      hnet::Env env(scenario);
      summary = hnet::evaluate_random(env, episodes, seed, tr);
    } else if (std::string(kind) == "heuristic") {
      summary = hnet::evaluate_heuristic(scenario, tr);
    } else {
      throw std::invalid_argument(std::string("unknown baseline kind: ") + kind);
    }
    if (mean_ee_out) *mean_ee_out = summary.mean_ee;
  });
}

hn_status hn_export_trace(const char* trace_path, const char* out_dir) {
  if (auto st = require(trace_path && out_dir, "trace/out_dir is NULL")) return st;
  return guard([&] { hnet::export_trajectories(trace_path, out_dir); });
}

}  // extern "C"
