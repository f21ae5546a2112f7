#include "link_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace hnet {

double device_power_watts(const EndDevice& dev, const ScenarioConfig& config) {
  return dbm_to_watts(dev.tx_power_dbm) + config.circuit_power;
}

double hover_power(const ScenarioConfig& config) {
  const auto& u = config.uav;
  if (u.rotor_area <= 0.0)
    throw std::invalid_argument("hover_power: rotor area must be positive");
  const double disk_loading =
      u.weight_newton / (2.0 * u.air_density * u.num_rotors * u.rotor_area);
  return (1.0 + u.k_ind) * u.weight_newton * std::sqrt(disk_loading);
}

LinkReport link_report(const ClusterLinkState& cluster, std::size_t index,
                       const ScenarioConfig& config) {
  if (index >= cluster.devices.size() ||
      cluster.devices.size() != cluster.gains.size())
    throw std::invalid_argument("link_report: device index outside cluster");
  const EndDevice& dev = *cluster.devices[index];
  const double rx = dbm_to_watts(dev.tx_power_dbm) * cluster.gains[index];

  double interference = 0.0;
  for (std::size_t i = 0; i < cluster.devices.size(); ++i) {
    if (i == index) continue;
    const EndDevice& other = *cluster.devices[i];
    if (other.sf != dev.sf) continue;  // orthogonal spreading factors
    interference += dbm_to_watts(other.tx_power_dbm) * cluster.gains[i];
  }

  LinkReport out;
  out.snr_db = 10.0 * std::log10(rx / config.noise_power);
  out.sinr_linear = rx / (interference + config.noise_power);
  out.feasible = out.snr_db >= snr_threshold_db(dev.sf);
  out.rate = out.feasible
                 ? config.bandwidth * std::log2(1.0 + out.sinr_linear)
                 : 0.0;
  return out;
}

EnergyEfficiency energy_efficiency(const std::vector<ClusterLinkState>& clusters,
                                   const std::vector<UavState>& uavs,
                                   const ScenarioConfig& config) {
  if (clusters.size() != uavs.size())
    throw std::invalid_argument("energy_efficiency: cluster/uav count mismatch");
  EnergyEfficiency out;
  out.per_uav.reserve(clusters.size());
  for (std::size_t u = 0; u < clusters.size(); ++u) {
    double throughput = 0.0;
    double power = uavs[u].hover_power;
    for (std::size_t i = 0; i < clusters[u].devices.size(); ++i) {
      throughput += link_report(clusters[u], i, config).rate;
      power += device_power_watts(*clusters[u].devices[i], config);
    }
    const double local = throughput / power;
    out.per_uav.push_back(local);
    out.global += local;
  }
  return out;
}

}  // namespace hnet
