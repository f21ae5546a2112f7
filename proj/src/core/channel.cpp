#include "channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hnet {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kRadToDeg = 180.0 / kPi;
}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

SoilAttenuation soil_constants(const ScenarioConfig& config) {
  const auto& s = config.soil;
  if (s.eps_real <= 1.0)
    throw std::invalid_argument(
        "soil eps_real must exceed 1 for the refraction geometry");
  const double omega = 2.0 * kPi * config.carrier_freq;
  const double mu = s.mu_r * config.mu0;
  const double eps = s.eps_real * config.eps0;
  const double loss_tangent_sq = (s.eps_imag / s.eps_real) * (s.eps_imag / s.eps_real);
  const double root = std::sqrt(1.0 + loss_tangent_sq);

  SoilAttenuation out;
  out.alpha = omega * std::sqrt(mu * eps / 2.0 * (root - 1.0));
  out.beta = omega * std::sqrt(mu * eps / 2.0 * (root + 1.0));
  out.path_length =
      config.burial_depth / std::cos(std::asin(1.0 / std::sqrt(s.eps_real)));
  const double amplitude = 2.0 * out.beta * out.path_length *
                           std::exp(out.alpha * out.path_length);
  out.loss_linear = amplitude * amplitude;
  return out;
}

LinkLoss ug2a_loss(const EndDevice& dev, const UavState& uav,
                   const SoilAttenuation& soil, const ScenarioConfig& config) {
  if (dev.layer != Layer::kUnderground)
    throw std::invalid_argument("ug2a_loss requires an underground device");
  const double d = distance(dev.position, uav.position);
  if (d <= 0.0) throw std::invalid_argument("ug2a_loss: zero link distance");
  const double fspl_const = 4.0 * kPi * config.carrier_freq / config.c0;
  const double air = fspl_const * fspl_const *
                     std::pow(d, config.soil.path_loss_exp);
  LinkLoss out;
  const double linear = soil.loss_linear * air;  // refraction loss taken as 1
  out.loss_db = 10.0 * std::log10(linear);
  out.gain_linear = std::pow(10.0, -out.loss_db / 10.0);
  return out;
}

double los_probability(const EndDevice& dev, const UavState& uav,
                       const ScenarioConfig& config) {
  const double d = distance(dev.position, uav.position);
  if (d <= 0.0) throw std::invalid_argument("los_probability: zero link distance");
  const double theta_deg = std::asin(uav.position[2] / d) * kRadToDeg;
  const auto& g = config.g2a;
  return 1.0 / (1.0 + g.phi * std::exp(-g.varphi * (theta_deg - g.phi)));
}

LinkLoss g2a_loss(const EndDevice& dev, const UavState& uav,
                  const ScenarioConfig& config) {
  if (dev.layer != Layer::kGround)
    throw std::invalid_argument("g2a_loss requires a ground device");
  const double d = distance(dev.position, uav.position);
  if (d <= 0.0) throw std::invalid_argument("g2a_loss: zero link distance");
  const double p_los = los_probability(dev, uav, config);
  const double fspl_db =
      20.0 * std::log10(4.0 * kPi * config.carrier_freq * d / config.c0);
  LinkLoss out;
  out.loss_db = fspl_db + p_los * config.g2a.eta_los_db +
                (1.0 - p_los) * config.g2a.eta_nlos_db;
  out.gain_linear = std::pow(10.0, -out.loss_db / 10.0);
  return out;
}

LinkLoss channel_gain(const EndDevice& dev, const UavState& uav,
                      const SoilAttenuation& soil, const ScenarioConfig& config) {
  return dev.layer == Layer::kUnderground ? ug2a_loss(dev, uav, soil, config)
                                          : g2a_loss(dev, uav, config);
}

}  // namespace hnet
