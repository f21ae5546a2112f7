#ifndef HNET_CHANNEL_HPP_
#define HNET_CHANNEL_HPP_

#include "config.hpp"
#include "scenario.hpp"

namespace hnet {

// Soil propagation constants derived from the complex permittivity.
struct SoilAttenuation {
  double alpha = 0.0;          // attenuation constant, Np/m
  double beta = 0.0;           // phase constant, rad/m
  double path_length = 0.0;    // d_p, oblique underground path, meters
  double loss_linear = 1.0;    // soil loss factor (dimensionless, >= 1)
};

struct LinkLoss {
  double loss_db = 0.0;
  double gain_linear = 1.0;  // 10^(-loss_db/10)
};

// alpha/beta from the lossy-medium propagation constants; d_p from the
// burial depth and the critical refraction angle; loss = (2*beta*d_p)^2 *
// exp(2*alpha*d_p). Throws if eps_real <= 1.
SoilAttenuation soil_constants(const ScenarioConfig& config);

double distance(const Vec3& a, const Vec3& b);

// Underground-to-air: soil loss times free-space-style air loss with the
// configured path loss exponent. Computed linearly, converted to dB once.
LinkLoss ug2a_loss(const EndDevice& dev, const UavState& uav,
                   const SoilAttenuation& soil, const ScenarioConfig& config);

// Logistic line-of-sight probability in the elevation angle (degrees).
double los_probability(const EndDevice& dev, const UavState& uav,
                       const ScenarioConfig& config);

// Ground-to-air: free-space term plus LoS-probability-weighted excess loss.
LinkLoss g2a_loss(const EndDevice& dev, const UavState& uav,
                  const ScenarioConfig& config);

// Dispatch on the device layer.
LinkLoss channel_gain(const EndDevice& dev, const UavState& uav,
                      const SoilAttenuation& soil, const ScenarioConfig& config);

}  // namespace hnet

#endif  // HNET_CHANNEL_HPP_
