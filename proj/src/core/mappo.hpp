#ifndef HNET_MAPPO_HPP_
#define HNET_MAPPO_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "env.hpp"
#include "neural.hpp"

namespace hnet {

struct Transition {
  std::vector<double> obs;
  std::vector<double> global_state;
  std::array<double, 3> pre_tanh{};
  std::vector<int> sf_choice, power_choice;
  double log_prob_old = 0.0;
  double reward = 0.0;      // scaled, used for GAE
  double raw_reward = 0.0;  // as emitted by the environment
  double value = 0.0;       // critic estimate, frozen at collection time
  bool episode_end = false;
  double advantage = 0.0;
  double ret = 0.0;
};

struct TransitionBatch {
  std::vector<std::vector<Transition>> agents;  // [agent][t], t < T
  double bootstrap_value = 0.0;                 // critic on the post-rollout state
  std::vector<double> episode_returns;  // raw returns of episodes finished here
};

// Reverse-recursion GAE. values_with_bootstrap has length rewards.size()+1;
// dones (optional) masks the bootstrap across episode boundaries.
// Returns (advantages, returns) with returns = advantages + values.
std::pair<std::vector<double>, std::vector<double>> compute_gae(
    const std::vector<double>& rewards,
    const std::vector<double>& values_with_bootstrap, double gamma,
    double lambda, const std::vector<std::uint8_t>* dones = nullptr);

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio_dev = 0.0;  // mean |r-1| on the first minibatch pass
};

struct MetricRow {
  std::int64_t env_steps = 0;
  double episode_return = 0.0;  // mean over episodes finished this rollout
  double global_ee = 0.0;
  double actor_loss = 0.0;
  double critic_loss = 0.0;
  double entropy = 0.0;
};

// Centralized-training / decentralized-execution PPO over per-agent actors
// and one shared critic. Actors act from local observations only; the
// critic reads the global state during updates.
class Trainer {
 public:
  Trainer(Scenario scenario, TrainConfig config, std::uint64_t seed);

  TransitionBatch collect_rollout(int steps);
  // Computes GAE + normalized advantages in place for a collected batch.
  void prepare_batch(TransitionBatch& batch) const;
  UpdateStats ppo_update(TransitionBatch& batch);

  // Full loop: collect -> GAE -> update until total_steps; returns the
  // metric log. checkpoint_sink, when set, is called at every checkpoint
  // interval and once at the end.
  std::vector<MetricRow> train(
      const std::function<void(std::int64_t, const Checkpoint&)>&
          checkpoint_sink = nullptr);

  Checkpoint checkpoint() const;
  void restore(const Checkpoint& ckpt);

  Env& env() { return env_; }
  const std::vector<PolicyHeads>& actors() const { return actors_; }
  ValueNet& critic() { return critic_; }
  const TrainConfig& config() const { return config_; }
  std::int64_t env_steps() const { return env_steps_; }

 private:
  TrainConfig config_;
  Env env_;
  std::vector<PolicyHeads> actors_;
  ValueNet critic_;
  std::vector<Adam> actor_trunk_opt_, actor_logstd_opt_;
  Adam critic_opt_;
  Rng rng_;        // action sampling + minibatch shuffling
  Rng reset_rng_;  // episode start seeds
  StepResult current_;
  std::vector<double> episode_return_acc_;  // running per-agent raw return
  std::int64_t env_steps_ = 0;
  double entropy_coef_now_;  // annealed by train(), read by ppo_update()
  double lr_scale_now_ = 1.0;  // same schedule, multiplies both learning rates
};

// Restore trained actors (and critic) outside a Trainer, e.g. for greedy
// evaluation of a stored checkpoint.
std::vector<PolicyHeads> actors_from_checkpoint(const Checkpoint& ckpt,
                                                const Env& env, int hidden);

}  // namespace hnet

#endif  // HNET_MAPPO_HPP_
