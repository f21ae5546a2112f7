#ifndef HNET_SCENARIO_HPP_
#define HNET_SCENARIO_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "rng.hpp"

namespace hnet {

using Vec3 = std::array<double, 3>;

enum class Layer : int { kUnderground = 0, kGround = 1 };

struct EndDevice {
  int id = 0;
  int cluster = 0;
  Layer layer = Layer::kGround;
  Vec3 position{0.0, 0.0, 0.0};  // h = -burial_depth underground, 0 on ground
  int sf = 7;
  double tx_power_dbm = 2.0;
};

struct UavState {
  int id = 0;
  Vec3 position{0.0, 0.0, 0.0};
  double hover_power = 0.0;  // watts
};

// Immutable deployment: device geometry and initial UAV placement. Safe to
// share read-only across threads once generated.
struct Scenario {
  ScenarioConfig config;
  std::vector<EndDevice> devices;
  std::vector<UavState> uavs;

  std::vector<const EndDevice*> cluster_devices(int cluster) const;
};

// Draws the deployment from the seeded configuration. Per cluster:
// devices ~ N(centroid, sigma_u^2 I2) clamped into the area, the configured
// underground fraction assigned layer 0 (rounded to nearest), one UAV with
// (x,y) uniform in a centroid +/- 2*sigma_u box (clamped) and altitude
// uniform in [alt_min, alt_max]. Same config+seed gives bit-identical output.
Scenario generate_scenario(const ScenarioConfig& config);

// Re-draw a single UAV start position (used by episode resets).
Vec3 draw_uav_start(const ScenarioConfig& config, int cluster, Rng& rng);

// Text serialization: config block (JSON) + one row per device + one row per
// UAV. Round-trips exactly (hex float encoding for coordinates).
std::string to_text(const Scenario& s);
Scenario scenario_from_text(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace hnet

#endif  // HNET_SCENARIO_HPP_
