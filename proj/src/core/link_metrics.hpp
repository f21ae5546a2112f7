#ifndef HNET_LINK_METRICS_HPP_
#define HNET_LINK_METRICS_HPP_

#include <vector>

#include "config.hpp"
#include "scenario.hpp"

namespace hnet {

struct LinkReport {
  double snr_db = 0.0;
  double sinr_linear = 0.0;
  double rate = 0.0;     // bits/s; zero when the SNR misses the SF threshold
  bool feasible = false;
};

// Devices of one cluster with their current linear channel gains to the
// serving UAV, index-aligned.
struct ClusterLinkState {
  std::vector<const EndDevice*> devices;
  std::vector<double> gains;
};

struct EnergyEfficiency {
  double global = 0.0;            // bits/joule, sum of per-UAV terms
  std::vector<double> per_uav;
};

// Transmit power (dBm -> W) plus circuit power.
double device_power_watts(const EndDevice& dev, const ScenarioConfig& config);

// Induced multirotor hover power from the configured airframe constants.
// Altitude-independent; see Env::hover_power_model_hook for substitution.
double hover_power(const ScenarioConfig& config);

// SNR, co-SF SINR and Shannon rate for cluster.devices[index]. Interference
// sums same-cluster devices sharing the victim's spreading factor across
// both layers; other spreading factors are treated as orthogonal. Links
// whose SNR misses the sensitivity threshold for their SF carry zero rate.
LinkReport link_report(const ClusterLinkState& cluster, std::size_t index,
                       const ScenarioConfig& config);

// Per-UAV local efficiency (cluster throughput over cluster device power
// plus hover power) and their sum as the global figure.
EnergyEfficiency energy_efficiency(const std::vector<ClusterLinkState>& clusters,
                                   const std::vector<UavState>& uavs,
                                   const ScenarioConfig& config);

}  // namespace hnet

#endif  // HNET_LINK_METRICS_HPP_
