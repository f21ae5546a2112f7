#include "mappo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hnet {

namespace {

std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer over (seed, tag) so every consumer gets an
  // independent deterministic stream.
  std::uint64_t z = seed + tag * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<PolicyHeads> make_actors(const Env& env, int hidden,
                                     std::uint64_t seed) {
  Rng rng(substream(seed, 0));
  std::vector<PolicyHeads> actors;
  const auto& cfg = env.scenario().config;
  for (int u = 0; u < env.num_agents(); ++u) {
    actors.emplace_back(static_cast<int>(env.obs_dim(u)), hidden,
                        static_cast<int>(env.cluster_members(u).size()),
                        static_cast<int>(cfg.sf_set.size()),
                        static_cast<int>(cfg.power_set_dbm.size()), rng);
  }
  return actors;
}

ValueNet make_critic(const Env& env, int hidden, std::uint64_t seed) {
  Rng rng(substream(seed, 1));
  return ValueNet(static_cast<int>(env.global_state_dim()), hidden, rng);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> compute_gae(
    const std::vector<double>& rewards,
    const std::vector<double>& values_with_bootstrap, double gamma,
    double lambda, const std::vector<std::uint8_t>* dones) {
  const std::size_t n = rewards.size();
  if (values_with_bootstrap.size() != n + 1)
    throw std::invalid_argument("compute_gae: need len(values) = len(rewards)+1");
  if (dones && dones->size() != n)
    throw std::invalid_argument("compute_gae: dones length mismatch");
  std::vector<double> adv(n), ret(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double not_done = dones && (*dones)[i] ? 0.0 : 1.0;
    const double delta = rewards[i] +
                         gamma * values_with_bootstrap[i + 1] * not_done -
                         values_with_bootstrap[i];
    acc = delta + gamma * lambda * not_done * acc;
    adv[i] = acc;
    ret[i] = acc + values_with_bootstrap[i];
  }
  return {std::move(adv), std::move(ret)};
}

Trainer::Trainer(Scenario scenario, TrainConfig config, std::uint64_t seed)
    : config_(config),
      env_(std::move(scenario)),
      actors_(make_actors(env_, config.hidden_size, seed)),
      critic_(make_critic(env_, config.hidden_size, seed)),
      critic_opt_(critic_.net().params().size()),
      rng_(substream(seed, 2)),
      reset_rng_(substream(seed, 3)),
      entropy_coef_now_(config.entropy_coef) {
  config_.validate();
  for (auto& a : actors_) {
    actor_trunk_opt_.emplace_back(a.trunk().params().size());
    actor_logstd_opt_.emplace_back(a.log_std().size());
  }
  episode_return_acc_.assign(env_.num_agents(), 0.0);
  current_ = env_.reset(reset_rng_.next_u64());
}

TransitionBatch Trainer::collect_rollout(int steps) {
  const int num_agents = env_.num_agents();
  TransitionBatch batch;
  batch.agents.assign(num_agents, {});
  for (auto& v : batch.agents) v.reserve(steps);

  for (int t = 0; t < steps; ++t) {
    const double value = critic_.value(current_.global_state);
    std::vector<ActionCommand> actions;
    std::vector<PolicyHeads::Sample> samples;
    actions.reserve(num_agents);
    samples.reserve(num_agents);
    for (int u = 0; u < num_agents; ++u) {
      // Decentralized execution: actors only ever see their own observation.
      samples.push_back(actors_[u].sample(current_.observations[u], rng_));
      actions.push_back(samples.back().action);
    }
    StepResult next = env_.step(actions);
    ++env_steps_;
    for (int u = 0; u < num_agents; ++u) {
      Transition tr;
      tr.obs = current_.observations[u];
      tr.global_state = current_.global_state;
      tr.pre_tanh = samples[u].pre_tanh;
      tr.sf_choice = samples[u].action.sf_choice;
      tr.power_choice = samples[u].action.power_choice;
      tr.log_prob_old = samples[u].log_prob;
      tr.raw_reward = next.rewards[u];
      tr.reward = next.rewards[u] * config_.reward_scale;
      tr.value = value;
      tr.episode_end = next.done;
      batch.agents[u].push_back(std::move(tr));
      episode_return_acc_[u] += next.rewards[u];
    }
    if (next.done) {
      double mean_return = 0.0;
      for (double r : episode_return_acc_) mean_return += r;
      batch.episode_returns.push_back(mean_return / num_agents);
      std::fill(episode_return_acc_.begin(), episode_return_acc_.end(), 0.0);
      current_ = env_.reset(reset_rng_.next_u64());
    } else {
      current_ = std::move(next);
    }
  }
  batch.bootstrap_value = critic_.value(current_.global_state);
  return batch;
}

void Trainer::prepare_batch(TransitionBatch& batch) const {
  for (auto& transitions : batch.agents) {
    const std::size_t n = transitions.size();
    std::vector<double> rewards(n), values(n + 1);
    std::vector<std::uint8_t> dones(n);
    for (std::size_t i = 0; i < n; ++i) {
      rewards[i] = transitions[i].reward;
      values[i] = transitions[i].value;
      dones[i] = transitions[i].episode_end ? 1 : 0;
    }
    values[n] = batch.bootstrap_value;
    auto [adv, ret] = compute_gae(rewards, values, config_.discount,
                                  config_.gae_lambda, &dones);
    for (std::size_t i = 0; i < n; ++i) {
      transitions[i].advantage = adv[i];
      transitions[i].ret = ret[i];
    }
  }
  // Normalize advantages over the whole update batch (all agents pooled).
  double mean = 0.0, count = 0.0;
  for (const auto& ts : batch.agents)
    for (const auto& tr : ts) {
      mean += tr.advantage;
      count += 1.0;
    }
  mean /= count;
  double var = 0.0;
  for (const auto& ts : batch.agents)
    for (const auto& tr : ts) var += (tr.advantage - mean) * (tr.advantage - mean);
  const double stddev = std::sqrt(var / count);
  for (auto& ts : batch.agents)
    for (auto& tr : ts) tr.advantage = (tr.advantage - mean) / (stddev + 1e-8);
}

UpdateStats Trainer::ppo_update(TransitionBatch& batch) {
  const int num_agents = env_.num_agents();
  std::vector<std::pair<int, int>> samples;
  for (int u = 0; u < num_agents; ++u)
    for (int t = 0; t < static_cast<int>(batch.agents[u].size()); ++t)
      samples.emplace_back(u, t);

  std::vector<std::vector<double>> trunk_grads(num_agents), logstd_grads(num_agents);
  std::vector<double> critic_grads;
  UpdateStats stats;
  int stat_batches = 0;
  bool first_pass = true;

  for (int epoch = 0; epoch < config_.epochs_per_update; ++epoch) {
    // Fisher-Yates with the trainer rng keeps the whole update deterministic.
    for (std::size_t i = samples.size(); i > 1; --i)
      std::swap(samples[i - 1], samples[rng_.below(i)]);

    const std::size_t mb_size =
        (samples.size() + config_.minibatch_count - 1) / config_.minibatch_count;
    for (std::size_t mb_start = 0; mb_start < samples.size(); mb_start += mb_size) {
      const std::size_t mb_end = std::min(mb_start + mb_size, samples.size());
      std::vector<int> agent_counts(num_agents, 0);
      for (std::size_t i = mb_start; i < mb_end; ++i)
        ++agent_counts[samples[i].first];
      const double total = static_cast<double>(mb_end - mb_start);

      for (int u = 0; u < num_agents; ++u) {
        trunk_grads[u].assign(actors_[u].trunk().params().size(), 0.0);
        logstd_grads[u].assign(actors_[u].log_std().size(), 0.0);
      }
      critic_grads.assign(critic_.net().params().size(), 0.0);

      double actor_loss = 0.0, critic_loss = 0.0, entropy = 0.0, ratio_dev = 0.0;
      for (std::size_t i = mb_start; i < mb_end; ++i) {
        const auto [u, t] = samples[i];
        Transition& tr = batch.agents[u][t];
        auto eval = actors_[u].evaluate(tr.obs, tr.pre_tanh, tr.sf_choice,
                                        tr.power_choice);
        const double ratio = std::exp(eval.log_prob - tr.log_prob_old);
        const double clipped =
            std::clamp(ratio, 1.0 - config_.clip, 1.0 + config_.clip);
        const double surr1 = ratio * tr.advantage;
        const double surr2 = clipped * tr.advantage;
        const double inv_n = 1.0 / agent_counts[u];
        // The clipped branch has zero gradient in the ratio.
        const double d_logp =
            surr1 <= surr2 ? -tr.advantage * ratio * inv_n : 0.0;
        actors_[u].backward(eval, d_logp, -entropy_coef_now_ * inv_n,
                            trunk_grads[u], logstd_grads[u]);
        actor_loss += (-std::min(surr1, surr2) -
                       entropy_coef_now_ * eval.entropy) * inv_n;
        entropy += eval.entropy / total;
        if (first_pass) ratio_dev += std::abs(ratio - 1.0) / total;

        Mlp::Cache cache;
        const double v = critic_.value(tr.global_state, cache);
        const double err = v - tr.ret;
        critic_loss += config_.value_loss_coef * err * err / total;
        critic_.backward(cache, 2.0 * config_.value_loss_coef * err / total,
                         critic_grads);
      }
      if (!std::isfinite(actor_loss) || !std::isfinite(critic_loss))
        throw std::runtime_error("ppo_update: non-finite loss (actor=" +
                                 std::to_string(actor_loss) + ", critic=" +
                                 std::to_string(critic_loss) + ")");

      for (int u = 0; u < num_agents; ++u) {
        if (agent_counts[u] == 0) continue;
        clip_grad_norm(trunk_grads[u], config_.max_grad_norm);
        clip_grad_norm(logstd_grads[u], config_.max_grad_norm);
        actor_trunk_opt_[u].step(actors_[u].trunk().params(), trunk_grads[u],
                                 config_.lr_actor * lr_scale_now_);
        actor_logstd_opt_[u].step(actors_[u].log_std(), logstd_grads[u],
                                  config_.lr_actor * lr_scale_now_);
      }
      clip_grad_norm(critic_grads, config_.max_grad_norm);
      critic_opt_.step(critic_.net().params(), critic_grads,
                       config_.lr_critic * lr_scale_now_);

      stats.actor_loss += actor_loss / num_agents;
      stats.critic_loss += critic_loss;
      stats.entropy += entropy;
      if (first_pass) stats.mean_ratio_dev = ratio_dev;
      first_pass = false;
      ++stat_batches;
    }
  }
  stats.actor_loss /= stat_batches;
  stats.critic_loss /= stat_batches;
  stats.entropy /= stat_batches;
  return stats;
}

std::vector<MetricRow> Trainer::train(
    const std::function<void(std::int64_t, const Checkpoint&)>& checkpoint_sink) {
  std::vector<MetricRow> log;
  double last_return = 0.0;
  std::int64_t next_ckpt = config_.checkpoint_interval;
  while (env_steps_ < config_.total_steps) {
    // Linear schedules for the entropy bonus and learning-rate scale.
    const double progress = static_cast<double>(env_steps_) /
                            static_cast<double>(config_.total_steps);
    entropy_coef_now_ = config_.entropy_coef +
                        progress * (config_.entropy_coef_final -
                                    config_.entropy_coef);
    lr_scale_now_ = 1.0 + progress * (config_.lr_final_frac - 1.0);
    TransitionBatch batch = collect_rollout(config_.rollout_length);
    prepare_batch(batch);
    const UpdateStats stats = ppo_update(batch);
    if (!batch.episode_returns.empty()) {
      last_return = std::accumulate(batch.episode_returns.begin(),
                                    batch.episode_returns.end(), 0.0) /
                    static_cast<double>(batch.episode_returns.size());
    }
    log.push_back({env_steps_, last_return, current_.info.global_ee,
                   stats.actor_loss, stats.critic_loss, stats.entropy});
    if (checkpoint_sink && env_steps_ >= next_ckpt) {
      checkpoint_sink(env_steps_, checkpoint());
      next_ckpt += config_.checkpoint_interval;
    }
  }
  if (checkpoint_sink) checkpoint_sink(env_steps_, checkpoint());
  return log;
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint ckpt;
  for (std::size_t u = 0; u < actors_.size(); ++u) {
    ckpt.emplace_back("actor" + std::to_string(u) + ".trunk",
                      actors_[u].trunk().params());
    ckpt.emplace_back("actor" + std::to_string(u) + ".log_std",
                      actors_[u].log_std());
  }
  ckpt.emplace_back("critic.net", critic_.net().params());
  return ckpt;
}

namespace {

const std::vector<double>& find_tensor(const Checkpoint& ckpt,
                                       const std::string& name) {
  for (const auto& [n, data] : ckpt)
    if (n == name) return data;
  throw std::runtime_error("checkpoint missing tensor: " + name);
}

void assign_tensor(std::vector<double>& dst, const std::vector<double>& src,
                   const std::string& name) {
  if (dst.size() != src.size())
    throw std::runtime_error("checkpoint tensor size mismatch for " + name +
                             ": expected " + std::to_string(dst.size()) +
                             ", got " + std::to_string(src.size()));
  dst = src;
}

}  // namespace

void Trainer::restore(const Checkpoint& ckpt) {
  for (std::size_t u = 0; u < actors_.size(); ++u) {
    const std::string base = "actor" + std::to_string(u);
    assign_tensor(actors_[u].trunk().params(), find_tensor(ckpt, base + ".trunk"),
                  base + ".trunk");
    assign_tensor(actors_[u].log_std(), find_tensor(ckpt, base + ".log_std"),
                  base + ".log_std");
  }
  assign_tensor(critic_.net().params(), find_tensor(ckpt, "critic.net"),
                "critic.net");
}

std::vector<PolicyHeads> actors_from_checkpoint(const Checkpoint& ckpt,
                                                const Env& env, int hidden) {
  std::vector<PolicyHeads> actors = make_actors(env, hidden, 0);
  for (std::size_t u = 0; u < actors.size(); ++u) {
    const std::string base = "actor" + std::to_string(u);
    assign_tensor(actors[u].trunk().params(), find_tensor(ckpt, base + ".trunk"),
                  base + ".trunk");
    assign_tensor(actors[u].log_std(), find_tensor(ckpt, base + ".log_std"),
                  base + ".log_std");
  }
  return actors;
}

}  // namespace hnet
