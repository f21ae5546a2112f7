#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "channel.hpp"

namespace hnet {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + tag * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_trace_static(std::ostream& out, const Scenario& scenario) {
  out << "# heteronet-trace v1\n";
  out << "# V dev x y layer cluster | U step uav x y h reward local_ee | "
         "D step dev cluster sf power_dbm rate feasible | G step global_ee\n";
  for (const auto& d : scenario.devices) {
    out << "V\t" << d.id << '\t' << format_double(d.position[0]) << '\t'
        << format_double(d.position[1]) << '\t' << static_cast<int>(d.layer)
        << '\t' << d.cluster << "\n";
  }
}

void write_trace_step(std::ostream& out, const Env& env, const StepResult& r,
                      int step) {
  for (int u = 0; u < env.num_agents(); ++u) {
    const auto& pos = env.uavs()[u].position;
    out << "U\t" << step << '\t' << u << '\t' << format_double(pos[0]) << '\t'
        << format_double(pos[1]) << '\t' << format_double(pos[2]) << '\t'
        << format_double(r.rewards[u]) << '\t'
        << format_double(r.info.local_ee[u]) << "\n";
  }
  for (int u = 0; u < env.num_agents(); ++u) {
    const auto& members = env.cluster_members(u);
    const auto& reports = env.link_reports(u);
    for (std::size_t i = 0; i < members.size(); ++i) {
      const EndDevice& d = env.devices()[members[i]];
      out << "D\t" << step << '\t' << d.id << '\t' << d.cluster << '\t' << d.sf
          << '\t' << format_double(d.tx_power_dbm) << '\t'
          << format_double(reports[i].rate) << '\t'
          << (reports[i].feasible ? 1 : 0) << "\n";
    }
  }
  out << "G\t" << step << '\t' << format_double(r.info.global_ee) << "\n";
}

EvalSummary summarize(std::vector<EvalEpisode> episodes) {
  EvalSummary s;
  s.episodes = std::move(episodes);
  for (const auto& e : s.episodes) s.mean_ee += e.mean_ee;
  s.mean_ee /= static_cast<double>(s.episodes.size());
  double var = 0.0;
  for (const auto& e : s.episodes)
    var += (e.mean_ee - s.mean_ee) * (e.mean_ee - s.mean_ee);
  s.stddev_ee = std::sqrt(var / static_cast<double>(s.episodes.size()));
  return s;
}

std::vector<Vec3> uav_positions(const Env& env) {
  std::vector<Vec3> out;
  for (const auto& u : env.uavs()) out.push_back(u.position);
  return out;
}

template <typename ActionFn>
EvalSummary run_episodes(Env& env, int episodes, std::uint64_t seed,
                         std::ostream* trace, ActionFn&& next_actions) {
  if (episodes <= 0) throw std::invalid_argument("episodes must be positive");
  std::vector<EvalEpisode> out;
  for (int ep = 0; ep < episodes; ++ep) {
    StepResult r = env.reset(mix_seed(seed, static_cast<std::uint64_t>(ep)));
    std::ostream* tr = ep == 0 ? trace : nullptr;
    if (tr) {
      write_trace_static(*tr, env.scenario());
      write_trace_step(*tr, env, r, 0);
    }
    EvalEpisode e;
    int steps = 0;
    while (!r.done) {
      r = env.step(next_actions(env, r));
      ++steps;
      e.mean_ee += r.info.global_ee;
      e.final_ee = r.info.global_ee;
      if (tr) write_trace_step(*tr, env, r, steps);
    }
    e.mean_ee /= static_cast<double>(steps);
    e.final_uav_positions = uav_positions(env);
    out.push_back(std::move(e));
  }
  return summarize(std::move(out));
}

}  // namespace

EvalSummary evaluate_actors(Env& env, const std::vector<PolicyHeads>& actors,
                            int episodes, std::uint64_t seed,
                            std::ostream* trace) {
  if (static_cast<int>(actors.size()) != env.num_agents())
    throw std::invalid_argument("evaluate_actors: actor/agent count mismatch");
  return run_episodes(env, episodes, seed, trace,
                      [&actors](const Env& e, const StepResult& r) {
                        std::vector<ActionCommand> actions;
                        for (int u = 0; u < e.num_agents(); ++u)
                          actions.push_back(actors[u].mode(r.observations[u]));
                        return actions;
                      });
}

EvalSummary evaluate_random(Env& env, int episodes, std::uint64_t seed,
                            std::ostream* trace) {
  Rng rng(mix_seed(seed, 0x72616e64));
  return run_episodes(env, episodes, seed, trace,
                      [&rng](const Env& e, const StepResult&) {
                        return random_policy(e, rng);
                      });
}

EvalSummary evaluate_heuristic(const Scenario& scenario, std::ostream* trace) {
  const HeuristicAssignment assignment = fixed_heuristic_policy(scenario);
  const EnergyEfficiency ee = evaluate_assignment(scenario, assignment);
  if (trace) {
    write_trace_static(*trace, scenario);
    const auto& cfg = scenario.config;
    const SoilAttenuation soil = soil_constants(cfg);
    std::vector<EndDevice> devices = scenario.devices;
    for (std::size_t i = 0; i < devices.size(); ++i) {
      devices[i].sf = assignment.device_sf[i];
      devices[i].tx_power_dbm = assignment.device_power_dbm[i];
    }
    std::vector<ClusterLinkState> clusters(cfg.num_uavs);
    for (const auto& d : devices) {
      clusters[d.cluster].devices.push_back(&d);
      clusters[d.cluster].gains.push_back(
          channel_gain(d, assignment.uavs[d.cluster], soil, cfg).gain_linear);
    }
    for (int u = 0; u < cfg.num_uavs; ++u) {
      const auto& pos = assignment.uavs[u].position;
      const double reward = cfg.reward_weight * ee.global +
                            (1.0 - cfg.reward_weight) * ee.per_uav[u];
      *trace << "U\t0\t" << u << '\t' << format_double(pos[0]) << '\t'
             << format_double(pos[1]) << '\t' << format_double(pos[2]) << '\t'
             << format_double(reward) << '\t' << format_double(ee.per_uav[u])
             << "\n";
    }
    for (int u = 0; u < cfg.num_uavs; ++u) {
      for (std::size_t i = 0; i < clusters[u].devices.size(); ++i) {
        const EndDevice& d = *clusters[u].devices[i];
        const LinkReport rep = link_report(clusters[u], i, cfg);
        *trace << "D\t0\t" << d.id << '\t' << d.cluster << '\t' << d.sf << '\t'
               << format_double(d.tx_power_dbm) << '\t'
               << format_double(rep.rate) << '\t' << (rep.feasible ? 1 : 0)
               << "\n";
      }
    }
    *trace << "G\t0\t" << format_double(ee.global) << "\n";
  }
  EvalEpisode e;
  e.mean_ee = ee.global;
  e.final_ee = ee.global;
  for (const auto& u : assignment.uavs) e.final_uav_positions.push_back(u.position);
  return summarize({e});
}

PresetSpec parse_preset(const std::string& name) {
  if (name == "hetero") return {name, true, 0.5};
  if (name == "ug_only") return {name, true, 1.0};
  if (name == "g_only") return {name, true, 0.0};
  if (name == "random") return {name, false, -1.0};
  if (name == "fixed_heuristic") return {name, false, -1.0};
  throw std::invalid_argument("unknown preset: " + name);
}

ScenarioConfig apply_preset(ScenarioConfig base, const PresetSpec& preset) {
  if (preset.underground_fraction >= 0.0)
    base.underground_fraction = preset.underground_fraction;
  return base;
}

void write_metrics(const std::vector<MetricRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics file: " + path);
  out << "step\treturn\tee\tactor_loss\tcritic_loss\tentropy\n";
  for (const auto& r : rows) {
    out << r.env_steps << '\t' << format_double(r.episode_return) << '\t'
        << format_double(r.global_ee) << '\t' << format_double(r.actor_loss)
        << '\t' << format_double(r.critic_loss) << '\t'
        << format_double(r.entropy) << "\n";
  }
}

namespace {

void write_eval_summary(const std::string& path, const std::string& preset,
                        std::uint64_t seed, const EvalSummary& s) {
  std::ofstream out(path, std::ios::binary);
  out << "preset\t" << preset << "\n";
  out << "seed\t" << seed << "\n";
  out << "episodes\t" << s.episodes.size() << "\n";
  out << "mean_ee\t" << format_double(s.mean_ee) << "\n";
  out << "stddev_ee\t" << format_double(s.stddev_ee) << "\n";
}

}  // namespace

ExperimentOutcome run_experiment(const std::string& preset,
                                 const std::vector<std::uint64_t>& seeds,
                                 const ScenarioConfig& base_config,
                                 const TrainConfig& train_config,
                                 const std::string& out_root,
                                 int eval_episodes) {
  const PresetSpec spec = parse_preset(preset);
  if (seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");
  ExperimentOutcome outcome;
  outcome.preset = preset;
  outcome.dir = (fs::path(out_root) / preset).string();
  std::error_code ec;
  fs::create_directories(outcome.dir, ec);
  if (ec || !fs::is_directory(outcome.dir))
    throw std::runtime_error("cannot create output directory: " + outcome.dir);

  for (std::uint64_t seed : seeds) {
    ScenarioConfig cfg = apply_preset(base_config, spec);
    cfg.rng_seed = seed;
    cfg.validate();
    const fs::path seed_dir = fs::path(outcome.dir) / std::to_string(seed);
    fs::create_directories(seed_dir);

    Scenario scenario = generate_scenario(cfg);
    save_scenario(scenario, (seed_dir / "scenario.txt").string());

    EvalSummary summary;
    std::ofstream trace((seed_dir / "trace.tsv").string(), std::ios::binary);
    if (spec.learned) {
      Trainer trainer(scenario, train_config, seed);
      const std::string ckpt_path = (seed_dir / "checkpoint.bin").string();
      auto metrics = trainer.train(
          [&](std::int64_t, const Checkpoint& ckpt) {
            save_checkpoint(ckpt, ckpt_path);
          });
      write_metrics(metrics, (seed_dir / "metrics.tsv").string());
      Env eval_env(scenario);
      summary = evaluate_actors(eval_env, trainer.actors(), eval_episodes,
                                mix_seed(seed, 0x6576616c), &trace);
    } else if (preset == "random") {
      Env env(scenario);
      summary = evaluate_random(env, eval_episodes, mix_seed(seed, 0x6576616c),
                                &trace);
    } else {  // fixed_heuristic
      summary = evaluate_heuristic(scenario, &trace);
    }
    write_eval_summary((seed_dir / "summary.txt").string(), preset, seed,
                       summary);
    outcome.seeds.push_back(
        {seed, summary.mean_ee, summary.stddev_ee, seed_dir.string()});
  }

  for (const auto& s : outcome.seeds) outcome.mean_ee += s.mean_ee;
  outcome.mean_ee /= static_cast<double>(outcome.seeds.size());
  double var = 0.0;
  for (const auto& s : outcome.seeds)
    var += (s.mean_ee - outcome.mean_ee) * (s.mean_ee - outcome.mean_ee);
  outcome.stddev_ee = std::sqrt(var / static_cast<double>(outcome.seeds.size()));

  std::ofstream out(fs::path(outcome.dir) / "summary.txt", std::ios::binary);
  out << "preset\t" << preset << "\n";
  out << "seeds";
  for (const auto& s : outcome.seeds) out << '\t' << s.seed;
  out << "\n";
  out << "mean_ee\t" << format_double(outcome.mean_ee) << "\n";
  out << "stddev_ee\t" << format_double(outcome.stddev_ee) << "\n";
  return outcome;
}

void export_trajectories(const std::string& trace_path,
                         const std::string& out_dir) {
  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace: " + trace_path);
  fs::create_directories(out_dir);
  std::ofstream paths(fs::path(out_dir) / "uav_paths.tsv", std::ios::binary);
  std::ofstream devices(fs::path(out_dir) / "devices.tsv", std::ios::binary);
  std::ofstream assoc(fs::path(out_dir) / "associations.tsv", std::ios::binary);
  paths << "step\tuav\tx\ty\th\n";
  devices << "device\tx\ty\tlayer\n";
  assoc << "device\tuav\n";

  std::string line;
  std::size_t path_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string kind;
    row >> kind;
    if (kind == "V") {
      int dev, layer, cluster;
      std::string x, y;
      row >> dev >> x >> y >> layer >> cluster;
      devices << dev << '\t' << x << '\t' << y << '\t' << layer << "\n";
      assoc << dev << '\t' << cluster << "\n";
    } else if (kind == "U") {
      int step, uav;
      std::string x, y, h;
      row >> step >> uav >> x >> y >> h;
      if (step == 0) continue;  // starting pose, not a path segment
      paths << step << '\t' << uav << '\t' << x << '\t' << y << '\t' << h << "\n";
      ++path_rows;
    }
  }
  if (path_rows == 0)
    throw std::runtime_error("trace has no step rows: " + trace_path);
}

}  // namespace hnet
