#ifndef HNET_BASELINES_HPP_
#define HNET_BASELINES_HPP_

#include <vector>

#include "env.hpp"
#include "link_metrics.hpp"
#include "scenario.hpp"

namespace hnet {

struct HeuristicConfig {
  // Negative means "use the altitude-range midpoint".
  double fixed_altitude = -1.0;
};

// Static non-learning assignment: UAVs pinned at their POI centroids.
struct HeuristicAssignment {
  std::vector<UavState> uavs;
  std::vector<int> device_sf;           // indexed by device id
  std::vector<double> device_power_dbm;
};

// Uniform random action for every agent: movement ~ U[-1,1]^3, SF and power
// indices uniform over their sets.
std::vector<ActionCommand> random_policy(const Env& env, Rng& rng);

// Distance-based allocation: per cluster, devices sorted by 3D distance to
// the pinned UAV get spreading factors by equal-mass quantile (nearest bin
// lowest SF), and each device the smallest power level whose SNR meets the
// threshold for its SF (maximum level if none does).
HeuristicAssignment fixed_heuristic_policy(const Scenario& scenario,
                                           const HeuristicConfig& cfg = {});

// Energy efficiency of a static assignment, via the full channel pipeline.
EnergyEfficiency evaluate_assignment(const Scenario& scenario,
                                     const HeuristicAssignment& assignment);

}  // namespace hnet

#endif  // HNET_BASELINES_HPP_
