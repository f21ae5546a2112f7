#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "channel.hpp"

namespace hnet {

std::vector<ActionCommand> random_policy(const Env& env, Rng& rng) {
  const auto& cfg = env.scenario().config;
  std::vector<ActionCommand> actions;
  actions.reserve(env.num_agents());
  for (int u = 0; u < env.num_agents(); ++u) {
    ActionCommand a;
    for (auto& m : a.move_delta) m = rng.uniform(-1.0, 1.0);
    const std::size_t n = env.cluster_members(u).size();
    for (std::size_t i = 0; i < n; ++i) {
      a.sf_choice.push_back(static_cast<int>(rng.below(cfg.sf_set.size())));
      a.power_choice.push_back(
          static_cast<int>(rng.below(cfg.power_set_dbm.size())));
    }
    actions.push_back(std::move(a));
  }
  return actions;
}

HeuristicAssignment fixed_heuristic_policy(const Scenario& scenario,
                                           const HeuristicConfig& hcfg) {
  const auto& cfg = scenario.config;
  const double altitude = hcfg.fixed_altitude >= 0.0
                              ? hcfg.fixed_altitude
                              : 0.5 * (cfg.alt_min + cfg.alt_max);
  const SoilAttenuation soil = soil_constants(cfg);
  const double hover = hover_power(cfg);

  HeuristicAssignment out;
  out.device_sf.assign(scenario.devices.size(), cfg.sf_set.front());
  out.device_power_dbm.assign(scenario.devices.size(),
                              cfg.power_set_dbm.front());

  for (int c = 0; c < cfg.num_uavs; ++c) {
    UavState uav;
    uav.id = c;
    uav.position = {cfg.cluster_centroids[c][0], cfg.cluster_centroids[c][1],
                    altitude};
    uav.hover_power = hover;

    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < scenario.devices.size(); ++i)
      if (scenario.devices[i].cluster == c) members.push_back(i);
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const double da = distance(scenario.devices[a].position, uav.position);
      const double db = distance(scenario.devices[b].position, uav.position);
      return da != db ? da < db : a < b;
    });

    const std::size_t m = members.size();
    const std::size_t num_sf = cfg.sf_set.size();
    for (std::size_t rank = 0; rank < m; ++rank) {
      const std::size_t dev = members[rank];
      const int sf = cfg.sf_set[std::min(rank * num_sf / m, num_sf - 1)];
      out.device_sf[dev] = sf;
      const double gain =
          channel_gain(scenario.devices[dev], uav, soil, cfg).gain_linear;
      const double threshold = snr_threshold_db(sf);
      double chosen = cfg.power_set_dbm.back();
      for (double p : cfg.power_set_dbm) {
        const double snr_db =
            10.0 * std::log10(dbm_to_watts(p) * gain / cfg.noise_power);
        if (snr_db >= threshold) {
          chosen = p;
          break;
        }
      }
      out.device_power_dbm[dev] = chosen;
    }
    out.uavs.push_back(uav);
  }
  return out;
}

EnergyEfficiency evaluate_assignment(const Scenario& scenario,
                                     const HeuristicAssignment& assignment) {
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
  return energy_efficiency(clusters, assignment.uavs, cfg);
}

}  // namespace hnet
