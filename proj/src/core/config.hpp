#ifndef HNET_CONFIG_HPP_
#define HNET_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hnet {

struct SoilParams {
  double eps_real = 18.2030;    // real part of relative permittivity
  double eps_imag = 0.16287;    // imaginary part
  double mu_r = 1.0;            // relative permeability
  double path_loss_exp = 2.0;   // above-ground path loss exponent
  // Metadata only: inputs of the (out-of-scope) dielectric model that
  // produced eps_real/eps_imag. Never used in any computation here.
  double soil_moisture = 0.20;
  double clay_fraction = 0.10;
  double sand_fraction = 0.90;
};

struct G2aParams {
  double phi = 4.88;        // environment constant (logistic offset)
  double varphi = 0.43;     // environment constant (logistic slope)
  double eta_los_db = 0.1;  // mean excess loss, LoS
  double eta_nlos_db = 21.0;
};

struct UavParams {
  double k_ind = 0.11;      // incremental induced-power factor
  double weight_newton = 20.0;
  double num_rotors = 4.0;
  double air_density = 1.168;   // kg/m^3
  double rotor_area = 0.214;    // m^2 per rotor
};

// Full physical parameterization of one deployment. Single source of truth;
// defaults reproduce the reference setup (2 km x 2 km, 4 clusters x 20
// devices, 868 MHz LoRa).
struct ScenarioConfig {
  double area_x_max = 2000.0;
  double area_y_max = 2000.0;
  int num_uavs = 4;
  int devices_per_cluster = 20;
  double underground_fraction = 0.5;
  std::vector<std::array<double, 2>> cluster_centroids = {
      {500.0, 500.0}, {1500.0, 500.0}, {500.0, 1500.0}, {1500.0, 1500.0}};
  double cluster_stddev = 150.0;  // sigma_u, meters
  double burial_depth = 0.4;      // d_b, meters
  double alt_min = 70.0;
  double alt_max = 150.0;
  double carrier_freq = 868e6;    // Hz
  double bandwidth = 125e3;       // Hz
  double noise_power = 1e-15;     // watts (-120 dBm)
  std::vector<int> sf_set = {7, 8, 9, 10, 11, 12};
  std::vector<double> power_set_dbm = {2.0, 5.0, 8.0, 11.0, 14.0};
  SoilParams soil;
  G2aParams g2a;
  UavParams uav;
  double circuit_power = 0.01;    // watts
  double step_size = 30.0;        // s_step, meters per unit action
  double reward_weight = 0.3;     // omega in the per-agent reward
  int max_steps_per_episode = 100;
  std::uint64_t rng_seed = 0;

  // Physical constants (exposed so serialized configs are self-contained).
  double mu0 = 4.0e-7 * 3.14159265358979323846;  // H/m
  double eps0 = 8.854e-12;                       // F/m
  double c0 = 3.0e8;                             // m/s

  // Throws std::invalid_argument on the first violated invariant.
  void validate() const;
};

struct TrainConfig {
  std::int64_t total_steps = 3'000'000;  // environment steps per agent
  int rollout_length = 100;              // T, steps per update
  int epochs_per_update = 4;
  int minibatch_count = 4;
  double clip = 0.2;
  double discount = 0.95;     // gamma
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  // Linear anneal target for the entropy bonus at the end of training.
  double entropy_coef_final = 0.0;
  double lr_actor = 3e-4;
  double lr_critic = 5e-4;
  // Linear learning-rate decay: multiplier reached at the end of training
  // (1.0 keeps both rates constant).
  double lr_final_frac = 0.1;
  double value_loss_coef = 0.5;
  double max_grad_norm = 0.5;
  double reward_scale = 1e-5;   // applied to rewards before GAE only
  int hidden_size = 128;
  std::int64_t checkpoint_interval = 50'000;  // env steps between checkpoints

  void validate() const;
};

// SNR sensitivity thresholds per spreading factor (dB), 125 kHz bandwidth.
double snr_threshold_db(int sf);

// JSON round-trip. Every field above maps to a named key; unknown keys are
// rejected so typos in experiment configs fail loudly.
std::string to_json(const ScenarioConfig& cfg);
std::string to_json(const TrainConfig& cfg);
ScenarioConfig scenario_config_from_json(const std::string& text);
TrainConfig train_config_from_json(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace hnet

#endif  // HNET_CONFIG_HPP_
