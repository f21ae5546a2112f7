#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace hnet {

using nlohmann::json;

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (area_x_max <= 0 || area_y_max <= 0) fail("area bounds must be positive");
  if (num_uavs <= 0) fail("num_uavs must be positive");
  if (devices_per_cluster <= 0) fail("devices_per_cluster must be positive");
  if (underground_fraction < 0.0 || underground_fraction > 1.0)
    fail("underground_fraction must be in [0,1]");
  if (static_cast<int>(cluster_centroids.size()) != num_uavs)
    fail("centroid count must equal num_uavs (one UAV per cluster)");
  for (const auto& c : cluster_centroids) {
    if (c[0] < 0 || c[0] > area_x_max || c[1] < 0 || c[1] > area_y_max)
      fail("cluster centroid outside deployment area");
  }
  if (cluster_stddev < 0) fail("cluster_stddev must be non-negative");
  if (burial_depth <= 0) fail("burial_depth must be positive");
  if (alt_min >= alt_max) fail("alt_min must be below alt_max");
  if (carrier_freq <= 0 || bandwidth <= 0) fail("freq/bandwidth must be positive");
  if (noise_power <= 0) fail("noise_power must be positive");
  if (sf_set.empty()) fail("sf_set must be non-empty");
  for (std::size_t i = 1; i < sf_set.size(); ++i)
    if (sf_set[i] <= sf_set[i - 1]) fail("sf_set must be strictly increasing");
  if (power_set_dbm.empty()) fail("power_set must be non-empty");
  for (std::size_t i = 1; i < power_set_dbm.size(); ++i)
    if (power_set_dbm[i] <= power_set_dbm[i - 1])
      fail("power_set must be strictly increasing");
  if (soil.eps_real <= 1.0)
    fail("soil eps_real must exceed 1 (refraction geometry)");
  if (uav.rotor_area <= 0 || uav.num_rotors <= 0 || uav.air_density <= 0 ||
      uav.weight_newton <= 0)
    fail("hover-power constants must be positive");
  if (circuit_power < 0) fail("circuit_power must be non-negative");
  if (step_size <= 0) fail("step_size must be positive");
  if (reward_weight < 0.0 || reward_weight > 1.0)
    fail("reward_weight must be in [0,1]");
  if (max_steps_per_episode <= 0) fail("max_steps_per_episode must be positive");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (total_steps <= 0) fail("total_steps must be positive");
  if (rollout_length <= 0) fail("rollout_length must be positive");
  if (epochs_per_update <= 0 || minibatch_count <= 0)
    fail("epochs/minibatches must be positive");
  if (clip <= 0.0 || clip >= 1.0) fail("clip must be in (0,1)");
  if (discount < 0.0 || discount > 1.0) fail("discount must be in [0,1]");
  if (gae_lambda < 0.0 || gae_lambda > 1.0) fail("gae_lambda must be in [0,1]");
  if (lr_actor <= 0 || lr_critic <= 0) fail("learning rates must be positive");
  if (lr_final_frac < 0) fail("lr_final_frac must be non-negative");
  if (entropy_coef < 0 || entropy_coef_final < 0)
    fail("entropy coefficients must be non-negative");
  if (reward_scale <= 0) fail("reward_scale must be positive");
  if (hidden_size <= 0) fail("hidden_size must be positive");
}

double snr_threshold_db(int sf) {
  switch (sf) {
    case 7: return -7.5;
    case 8: return -10.0;
    case 9: return -12.5;
    case 10: return -15.0;
    case 11: return -17.5;
    case 12: return -20.0;
    default: throw std::invalid_argument("no SNR threshold for SF " +
                                         std::to_string(sf));
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

namespace {

json scenario_to_json_obj(const ScenarioConfig& c) {
  json j;
  j["area_x_max"] = c.area_x_max;
  j["area_y_max"] = c.area_y_max;
  j["num_uavs"] = c.num_uavs;
  j["devices_per_cluster"] = c.devices_per_cluster;
  j["underground_fraction"] = c.underground_fraction;
  j["cluster_centroids"] = c.cluster_centroids;
  j["cluster_stddev"] = c.cluster_stddev;
  j["burial_depth"] = c.burial_depth;
  j["alt_min"] = c.alt_min;
  j["alt_max"] = c.alt_max;
  j["carrier_freq"] = c.carrier_freq;
  j["bandwidth"] = c.bandwidth;
  j["noise_power"] = c.noise_power;
  j["sf_set"] = c.sf_set;
  j["power_set_dbm"] = c.power_set_dbm;
  j["soil"] = {{"eps_real", c.soil.eps_real},
               {"eps_imag", c.soil.eps_imag},
               {"mu_r", c.soil.mu_r},
               {"path_loss_exp", c.soil.path_loss_exp},
               {"soil_moisture", c.soil.soil_moisture},
               {"clay_fraction", c.soil.clay_fraction},
               {"sand_fraction", c.soil.sand_fraction}};
  j["g2a"] = {{"phi", c.g2a.phi},
              {"varphi", c.g2a.varphi},
              {"eta_los_db", c.g2a.eta_los_db},
              {"eta_nlos_db", c.g2a.eta_nlos_db}};
  j["uav"] = {{"k_ind", c.uav.k_ind},
              {"weight_newton", c.uav.weight_newton},
              {"num_rotors", c.uav.num_rotors},
              {"air_density", c.uav.air_density},
              {"rotor_area", c.uav.rotor_area}};
  j["circuit_power"] = c.circuit_power;
  j["step_size"] = c.step_size;
  j["reward_weight"] = c.reward_weight;
  j["max_steps_per_episode"] = c.max_steps_per_episode;
  j["rng_seed"] = c.rng_seed;
  j["mu0"] = c.mu0;
  j["eps0"] = c.eps0;
  j["c0"] = c.c0;
  return j;
}

void check_unknown_keys(const json& j, const json& reference,
                        const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!reference.contains(it.key()))
      throw std::invalid_argument("unknown config key: " + scope + it.key());
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const ScenarioConfig& cfg) {
  return scenario_to_json_obj(cfg).dump(2);
}

ScenarioConfig scenario_config_from_json(const std::string& text) {
  ScenarioConfig c;  // defaults; file may override any subset
  json j = json::parse(text);
  check_unknown_keys(j, scenario_to_json_obj(c), "");
  maybe(j, "area_x_max", c.area_x_max);
  maybe(j, "area_y_max", c.area_y_max);
  maybe(j, "num_uavs", c.num_uavs);
  maybe(j, "devices_per_cluster", c.devices_per_cluster);
  maybe(j, "underground_fraction", c.underground_fraction);
  maybe(j, "cluster_centroids", c.cluster_centroids);
  maybe(j, "cluster_stddev", c.cluster_stddev);
  maybe(j, "burial_depth", c.burial_depth);
  maybe(j, "alt_min", c.alt_min);
  maybe(j, "alt_max", c.alt_max);
  maybe(j, "carrier_freq", c.carrier_freq);
  maybe(j, "bandwidth", c.bandwidth);
  maybe(j, "noise_power", c.noise_power);
  maybe(j, "sf_set", c.sf_set);
  maybe(j, "power_set_dbm", c.power_set_dbm);
  if (j.contains("soil")) {
    const json& s = j.at("soil");
    check_unknown_keys(s, scenario_to_json_obj(c).at("soil"), "soil.");
    maybe(s, "eps_real", c.soil.eps_real);
    maybe(s, "eps_imag", c.soil.eps_imag);
    maybe(s, "mu_r", c.soil.mu_r);
    maybe(s, "path_loss_exp", c.soil.path_loss_exp);
    maybe(s, "soil_moisture", c.soil.soil_moisture);
    maybe(s, "clay_fraction", c.soil.clay_fraction);
    maybe(s, "sand_fraction", c.soil.sand_fraction);
  }
  if (j.contains("g2a")) {
    const json& g = j.at("g2a");
    check_unknown_keys(g, scenario_to_json_obj(c).at("g2a"), "g2a.");
    maybe(g, "phi", c.g2a.phi);
    maybe(g, "varphi", c.g2a.varphi);
    maybe(g, "eta_los_db", c.g2a.eta_los_db);
    maybe(g, "eta_nlos_db", c.g2a.eta_nlos_db);
  }
  if (j.contains("uav")) {
    const json& u = j.at("uav");
    check_unknown_keys(u, scenario_to_json_obj(c).at("uav"), "uav.");
    maybe(u, "k_ind", c.uav.k_ind);
    maybe(u, "weight_newton", c.uav.weight_newton);
    maybe(u, "num_rotors", c.uav.num_rotors);
    maybe(u, "air_density", c.uav.air_density);
    maybe(u, "rotor_area", c.uav.rotor_area);
  }
  maybe(j, "circuit_power", c.circuit_power);
  maybe(j, "step_size", c.step_size);
  maybe(j, "reward_weight", c.reward_weight);
  maybe(j, "max_steps_per_episode", c.max_steps_per_episode);
  maybe(j, "rng_seed", c.rng_seed);
  maybe(j, "mu0", c.mu0);
  maybe(j, "eps0", c.eps0);
  maybe(j, "c0", c.c0);
  c.validate();
  return c;
}

std::string to_json(const TrainConfig& cfg) {
  json j;
  j["total_steps"] = cfg.total_steps;
  j["rollout_length"] = cfg.rollout_length;
  j["epochs_per_update"] = cfg.epochs_per_update;
  j["minibatch_count"] = cfg.minibatch_count;
  j["clip"] = cfg.clip;
  j["discount"] = cfg.discount;
  j["gae_lambda"] = cfg.gae_lambda;
  j["entropy_coef"] = cfg.entropy_coef;
  j["entropy_coef_final"] = cfg.entropy_coef_final;
  j["lr_actor"] = cfg.lr_actor;
  j["lr_critic"] = cfg.lr_critic;
  j["lr_final_frac"] = cfg.lr_final_frac;
  j["value_loss_coef"] = cfg.value_loss_coef;
  j["max_grad_norm"] = cfg.max_grad_norm;
  j["reward_scale"] = cfg.reward_scale;
  j["hidden_size"] = cfg.hidden_size;
  j["checkpoint_interval"] = cfg.checkpoint_interval;
  return j.dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
  TrainConfig c;
  json j = json::parse(text);
  check_unknown_keys(j, json::parse(to_json(c)), "");
  maybe(j, "total_steps", c.total_steps);
  maybe(j, "rollout_length", c.rollout_length);
  maybe(j, "epochs_per_update", c.epochs_per_update);
  maybe(j, "minibatch_count", c.minibatch_count);
  maybe(j, "clip", c.clip);
  maybe(j, "discount", c.discount);
  maybe(j, "gae_lambda", c.gae_lambda);
  maybe(j, "entropy_coef", c.entropy_coef);
  maybe(j, "entropy_coef_final", c.entropy_coef_final);
  maybe(j, "lr_actor", c.lr_actor);
  maybe(j, "lr_critic", c.lr_critic);
  maybe(j, "lr_final_frac", c.lr_final_frac);
  maybe(j, "value_loss_coef", c.value_loss_coef);
  maybe(j, "max_grad_norm", c.max_grad_norm);
  maybe(j, "reward_scale", c.reward_scale);
  maybe(j, "hidden_size", c.hidden_size);
  maybe(j, "checkpoint_interval", c.checkpoint_interval);
  c.validate();
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_config_from_json(ss.str());
}

}  // namespace hnet
