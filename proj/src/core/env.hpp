#ifndef HNET_ENV_HPP_
#define HNET_ENV_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "channel.hpp"
#include "link_metrics.hpp"
#include "scenario.hpp"

namespace hnet {

// Decoded per-agent action: a movement delta in [-1,1]^3 (scaled by the
// configured step size on application) plus one spreading-factor index and
// one power-level index per served device.
struct ActionCommand {
  std::array<double, 3> move_delta{0.0, 0.0, 0.0};
  std::vector<int> sf_choice;     // indices into config.sf_set
  std::vector<int> power_choice;  // indices into config.power_set_dbm
};

struct StepInfo {
  double global_ee = 0.0;
  std::vector<double> local_ee;
  int feasible_links = 0;
  int total_links = 0;
};

struct StepResult {
  std::vector<std::vector<double>> observations;  // per agent, in [0,1]
  std::vector<double> global_state;  // raw observations + UAV positions
  std::vector<double> rewards;
  bool done = false;
  StepInfo info;
};

// The multi-agent environment. One instance is single-writer (step/reset
// mutate it); run independent instances for parallel collection.
class Env {
 public:
  explicit Env(Scenario scenario);

  // Re-draws UAV starts, resets every device to the lowest SF and power
  // level, zeroes the step counter. Deterministic in the seed.
  StepResult reset(std::uint64_t seed);

  // Applies one action per agent, recomputes the physics, returns rewards
  // R_u = omega * EE_global + (1 - omega) * EE_local(u). Throws on action
  // shape mismatch or when called after done.
  StepResult step(const std::vector<ActionCommand>& actions);

  int num_agents() const { return scenario_.config.num_uavs; }
  std::size_t obs_dim(int agent) const {
    return 3 + 4 * cluster_members_[agent].size();
  }
  std::size_t global_state_dim() const;
  int step_count() const { return step_count_; }
  bool done() const { return done_; }

  const Scenario& scenario() const { return scenario_; }
  const std::vector<EndDevice>& devices() const { return devices_; }
  const std::vector<UavState>& uavs() const { return uavs_; }
  const SoilAttenuation& soil() const { return soil_; }

  // Current per-cluster link state (devices + gains), index-aligned with
  // cluster_members(); recomputed on every step/reset.
  ClusterLinkState cluster_link_state(int agent) const;
  const std::vector<int>& cluster_members(int agent) const {
    return cluster_members_[agent];
  }
  const std::vector<LinkReport>& link_reports(int agent) const {
    return reports_[agent];
  }

 private:
  void recompute();
  StepResult make_result() const;
  std::vector<double> raw_observation(int agent) const;
  std::vector<double> build_observation(int agent) const;

  Scenario scenario_;               // immutable reference deployment
  std::vector<EndDevice> devices_;  // mutable working copies
  std::vector<UavState> uavs_;
  std::vector<std::vector<int>> cluster_members_;  // device indices per agent
  SoilAttenuation soil_;
  Rng rng_;
  int step_count_ = 0;
  bool done_ = false;

  // Refreshed by recompute():
  std::vector<std::vector<double>> gains_;        // per agent per device
  std::vector<std::vector<LinkReport>> reports_;  // per agent per device
  EnergyEfficiency ee_;
};

}  // namespace hnet

#endif  // HNET_ENV_HPP_
