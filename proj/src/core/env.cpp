#include "env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hnet {

namespace {

double clampd(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Min-max one feature family to [0,1]; a constant family maps to 0.5.
void minmax_normalize(std::vector<double>& values, std::size_t begin,
                      std::size_t stride, std::size_t count) {
  double lo = values[begin], hi = values[begin];
  for (std::size_t i = 0; i < count; ++i) {
    lo = std::min(lo, values[begin + i * stride]);
    hi = std::max(hi, values[begin + i * stride]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    double& v = values[begin + i * stride];
    v = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  }
}

}  // namespace

Env::Env(Scenario scenario)
    : scenario_(std::move(scenario)),
      devices_(scenario_.devices),
      uavs_(scenario_.uavs),
      soil_(soil_constants(scenario_.config)),
      rng_(scenario_.config.rng_seed) {
  cluster_members_.resize(scenario_.config.num_uavs);
  for (std::size_t i = 0; i < devices_.size(); ++i)
    cluster_members_.at(devices_[i].cluster).push_back(static_cast<int>(i));
  recompute();
}

std::size_t Env::global_state_dim() const {
  std::size_t dim = 0;
  for (int u = 0; u < num_agents(); ++u) dim += obs_dim(u);
  return dim + 3 * static_cast<std::size_t>(num_agents());
}

StepResult Env::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  const auto& cfg = scenario_.config;
  for (int u = 0; u < num_agents(); ++u)
    uavs_[u].position = draw_uav_start(cfg, u, rng_);
  for (auto& d : devices_) {
    d.sf = cfg.sf_set.front();
    d.tx_power_dbm = cfg.power_set_dbm.front();
  }
  step_count_ = 0;
  done_ = false;
  recompute();
  return make_result();
}

StepResult Env::step(const std::vector<ActionCommand>& actions) {
  if (done_) throw std::logic_error("step() called on a finished episode");
  if (static_cast<int>(actions.size()) != num_agents())
    throw std::invalid_argument("step(): expected one action per agent");
  const auto& cfg = scenario_.config;

  for (int u = 0; u < num_agents(); ++u) {
    const auto& a = actions[u];
    const auto& members = cluster_members_[u];
    if (a.sf_choice.size() != members.size() ||
        a.power_choice.size() != members.size())
      throw std::invalid_argument("step(): action vector length mismatch");
    for (double m : a.move_delta)
      if (!std::isfinite(m))
        throw std::invalid_argument("step(): non-finite movement delta");

    auto& pos = uavs_[u].position;
    pos[0] = clampd(pos[0] + cfg.step_size * clampd(a.move_delta[0], -1.0, 1.0),
                    0.0, cfg.area_x_max);
    pos[1] = clampd(pos[1] + cfg.step_size * clampd(a.move_delta[1], -1.0, 1.0),
                    0.0, cfg.area_y_max);
    pos[2] = clampd(pos[2] + cfg.step_size * clampd(a.move_delta[2], -1.0, 1.0),
                    cfg.alt_min, cfg.alt_max);

    for (std::size_t i = 0; i < members.size(); ++i) {
      const int sf_idx = a.sf_choice[i];
      const int pw_idx = a.power_choice[i];
      if (sf_idx < 0 || sf_idx >= static_cast<int>(cfg.sf_set.size()))
        throw std::invalid_argument("step(): spreading factor index out of range");
      if (pw_idx < 0 || pw_idx >= static_cast<int>(cfg.power_set_dbm.size()))
        throw std::invalid_argument("step(): power index out of range");
      devices_[members[i]].sf = cfg.sf_set[sf_idx];
      devices_[members[i]].tx_power_dbm = cfg.power_set_dbm[pw_idx];
    }
  }

  ++step_count_;
  done_ = step_count_ >= cfg.max_steps_per_episode;
  recompute();
  return make_result();
}

void Env::recompute() {
  const int n = num_agents();
  gains_.assign(n, {});
  reports_.assign(n, {});
  std::vector<ClusterLinkState> clusters(n);
  for (int u = 0; u < n; ++u) {
    const auto& members = cluster_members_[u];
    clusters[u].devices.reserve(members.size());
    clusters[u].gains.reserve(members.size());
    for (int idx : members) {
      clusters[u].devices.push_back(&devices_[idx]);
      clusters[u].gains.push_back(
          channel_gain(devices_[idx], uavs_[u], soil_, scenario_.config)
              .gain_linear);
    }
    gains_[u] = clusters[u].gains;
    reports_[u].reserve(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
      reports_[u].push_back(link_report(clusters[u], i, scenario_.config));
  }
  ee_ = energy_efficiency(clusters, uavs_, scenario_.config);
}

ClusterLinkState Env::cluster_link_state(int agent) const {
  ClusterLinkState out;
  for (std::size_t i = 0; i < cluster_members_.at(agent).size(); ++i) {
    out.devices.push_back(&devices_[cluster_members_[agent][i]]);
    out.gains.push_back(gains_[agent][i]);
  }
  return out;
}

std::vector<double> Env::raw_observation(int agent) const {
  const auto& uav = uavs_[agent];
  std::vector<double> obs;
  obs.reserve(obs_dim(agent));
  obs.push_back(uav.position[0]);
  obs.push_back(uav.position[1]);
  obs.push_back(uav.position[2]);
  const auto& members = cluster_members_[agent];
  for (std::size_t i = 0; i < members.size(); ++i) {
    const EndDevice& d = devices_[members[i]];
    obs.push_back(distance(d.position, uav.position));
    obs.push_back(reports_[agent][i].snr_db);
    obs.push_back(static_cast<double>(d.sf));
    obs.push_back(d.tx_power_dbm);
  }
  return obs;
}

std::vector<double> Env::build_observation(int agent) const {
  const auto& cfg = scenario_.config;
  std::vector<double> obs = raw_observation(agent);
  // Position features scale by area/altitude bounds; per-device families
  // (distance, SNR, SF, power) min-max scale within the agent's own cluster.
  obs[0] /= cfg.area_x_max;
  obs[1] /= cfg.area_y_max;
  obs[2] = (obs[2] - cfg.alt_min) / (cfg.alt_max - cfg.alt_min);
  const std::size_t count = cluster_members_[agent].size();
  if (count > 0)
    for (std::size_t family = 0; family < 4; ++family)
      minmax_normalize(obs, 3 + family, 4, count);
  return obs;
}

StepResult Env::make_result() const {
  StepResult r;
  r.observations.reserve(num_agents());
  for (int u = 0; u < num_agents(); ++u)
    r.observations.push_back(build_observation(u));
  r.global_state.reserve(global_state_dim());
  for (int u = 0; u < num_agents(); ++u) {
    auto raw = raw_observation(u);
    r.global_state.insert(r.global_state.end(), raw.begin(), raw.end());
  }
  for (const auto& uav : uavs_)
    r.global_state.insert(r.global_state.end(), uav.position.begin(),
                          uav.position.end());
  const double omega = scenario_.config.reward_weight;
  r.rewards.reserve(num_agents());
  for (int u = 0; u < num_agents(); ++u)
    r.rewards.push_back(omega * ee_.global + (1.0 - omega) * ee_.per_uav[u]);
  r.done = done_;
  r.info.global_ee = ee_.global;
  r.info.local_ee = ee_.per_uav;
  for (int u = 0; u < num_agents(); ++u) {
    for (const auto& rep : reports_[u]) {
      ++r.info.total_links;
      if (rep.feasible) ++r.info.feasible_links;
    }
  }
  return r;
}

}  // namespace hnet
