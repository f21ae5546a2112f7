#ifndef HNET_HARNESS_HPP_
#define HNET_HARNESS_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "mappo.hpp"

namespace hnet {

// Experiment presets: the learned configurations differ only in how devices
// split across the vertical layers; the two baselines reuse the base split.
struct PresetSpec {
  std::string name;
  bool learned = false;
  double underground_fraction = -1.0;  // negative: keep the base value
};

PresetSpec parse_preset(const std::string& name);  // throws on unknown preset
ScenarioConfig apply_preset(ScenarioConfig base, const PresetSpec& preset);

struct EvalEpisode {
  double mean_ee = 0.0;   // global EE averaged over the episode's steps
  double final_ee = 0.0;
  std::vector<Vec3> final_uav_positions;
};

struct EvalSummary {
  double mean_ee = 0.0;    // across episodes
  double stddev_ee = 0.0;
  std::vector<EvalEpisode> episodes;
};

// Greedy evaluation (Gaussian mean, categorical argmax) over fresh episodes.
// When trace is non-null the first episode is written to it as a step trace.
EvalSummary evaluate_actors(Env& env, const std::vector<PolicyHeads>& actors,
                            int episodes, std::uint64_t seed,
                            std::ostream* trace = nullptr);

// Same protocol with uniformly random actions.
EvalSummary evaluate_random(Env& env, int episodes, std::uint64_t seed,
                            std::ostream* trace = nullptr);

// Static heuristic: deterministic, so one "episode"; writes a single-step
// trace when requested.
EvalSummary evaluate_heuristic(const Scenario& scenario,
                               std::ostream* trace = nullptr);

struct SeedOutcome {
  std::uint64_t seed = 0;
  double mean_ee = 0.0;
  double stddev_ee = 0.0;
  std::string dir;
};

struct ExperimentOutcome {
  std::string preset;
  std::vector<SeedOutcome> seeds;
  double mean_ee = 0.0;    // across seeds
  double stddev_ee = 0.0;
  std::string dir;
};

// Full driver: per seed, generate the scenario, train (learned presets) or
// evaluate (baselines), and emit scenario.txt, metrics.tsv, trace.tsv,
// checkpoint.bin and summary.txt under out_root/<preset>/<seed>/, plus a
// cross-seed summary at out_root/<preset>/summary.txt.
ExperimentOutcome run_experiment(const std::string& preset,
                                 const std::vector<std::uint64_t>& seeds,
                                 const ScenarioConfig& base_config,
                                 const TrainConfig& train_config,
                                 const std::string& out_root,
                                 int eval_episodes = 20);

// Splits a step trace into plot-ready files: uav_paths.tsv (step uav x y h),
// devices.tsv (device x y layer) and associations.tsv (device uav).
void export_trajectories(const std::string& trace_path,
                         const std::string& out_dir);

// Shortest round-trippable decimal form; all text outputs use it so reruns
// are byte-identical.
std::string format_double(double v);

void write_metrics(const std::vector<MetricRow>& rows, const std::string& path);

}  // namespace hnet

#endif  // HNET_HARNESS_HPP_
