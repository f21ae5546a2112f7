#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "link_metrics.hpp"

namespace hnet {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

std::vector<const EndDevice*> Scenario::cluster_devices(int cluster) const {
  std::vector<const EndDevice*> out;
  for (const auto& d : devices)
    if (d.cluster == cluster) out.push_back(&d);
  return out;
}

Vec3 draw_uav_start(const ScenarioConfig& config, int cluster, Rng& rng) {
  const auto& mu = config.cluster_centroids.at(cluster);
  const double half = 2.0 * config.cluster_stddev;
  const double x = clamp(rng.uniform(mu[0] - half, mu[0] + half), 0.0, config.area_x_max);
  const double y = clamp(rng.uniform(mu[1] - half, mu[1] + half), 0.0, config.area_y_max);
  const double h = rng.uniform(config.alt_min, config.alt_max);
  return {x, y, h};
}

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.config = config;
  Rng rng(config.rng_seed);
  const double hover = hover_power(config);

  // Draw order is fixed (per cluster: device x,y pairs, then the UAV start)
  // so that a given seed always consumes the stream identically.
  int next_id = 0;
  const int n = config.devices_per_cluster;
  const int n_underground = static_cast<int>(
      std::lround(config.underground_fraction * static_cast<double>(n)));
  for (int c = 0; c < config.num_uavs; ++c) {
    const auto& mu = config.cluster_centroids[c];
    for (int i = 0; i < n; ++i) {
      EndDevice d;
      d.id = next_id++;
      d.cluster = c;
      d.layer = i < n_underground ? Layer::kUnderground : Layer::kGround;
      d.position[0] = clamp(rng.normal(mu[0], config.cluster_stddev), 0.0, config.area_x_max);
      d.position[1] = clamp(rng.normal(mu[1], config.cluster_stddev), 0.0, config.area_y_max);
      d.position[2] = d.layer == Layer::kUnderground ? -config.burial_depth : 0.0;
      d.sf = config.sf_set.front();
      d.tx_power_dbm = config.power_set_dbm.front();
      s.devices.push_back(d);
    }
    UavState u;
    u.id = c;
    u.position = draw_uav_start(config, c, rng);
    u.hover_power = hover;
    s.uavs.push_back(u);
  }
  return s;
}

namespace {

std::string hexf(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok) {
  try {
    return std::stod(tok);
  } catch (const std::exception&) {
    throw std::runtime_error("scenario file: bad numeric field '" + tok + "'");
  }
}

}  // namespace

std::string to_text(const Scenario& s) {
  std::ostringstream out;
  out << "heteronet-scenario v1\n";
  out << "#config\n" << nlohmann::json::parse(to_json(s.config)).dump() << "\n";
  out << "#devices " << s.devices.size() << "\n";
  for (const auto& d : s.devices) {
    out << d.id << ' ' << d.cluster << ' ' << static_cast<int>(d.layer) << ' '
        << hexf(d.position[0]) << ' ' << hexf(d.position[1]) << ' '
        << hexf(d.position[2]) << ' ' << d.sf << ' ' << hexf(d.tx_power_dbm)
        << "\n";
  }
  out << "#uavs " << s.uavs.size() << "\n";
  for (const auto& u : s.uavs) {
    out << u.id << ' ' << hexf(u.position[0]) << ' ' << hexf(u.position[1])
        << ' ' << hexf(u.position[2]) << ' ' << hexf(u.hover_power) << "\n";
  }
  return out.str();
}

Scenario scenario_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&](const char* what) {
    if (!std::getline(in, line))
      throw std::runtime_error(std::string("scenario file truncated before ") + what);
    return line;
  };
  if (next_line("header") != "heteronet-scenario v1")
    throw std::runtime_error("not a heteronet scenario file");
  if (next_line("#config") != "#config")
    throw std::runtime_error("scenario file: missing #config block");
  Scenario s;
  s.config = scenario_config_from_json(next_line("config json"));

  std::istringstream hdr(next_line("#devices"));
  std::string tag;
  std::size_t count = 0;
  hdr >> tag >> count;
  if (tag != "#devices") throw std::runtime_error("scenario file: missing #devices");
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream row(next_line("device row"));
    EndDevice d;
    int layer;
    std::string x, y, h, p;
    if (!(row >> d.id >> d.cluster >> layer >> x >> y >> h >> d.sf >> p))
      throw std::runtime_error("scenario file: malformed device row");
    d.layer = static_cast<Layer>(layer);
    d.position = {parse_double(x), parse_double(y), parse_double(h)};
    d.tx_power_dbm = parse_double(p);
    s.devices.push_back(d);
  }
  std::istringstream hdr2(next_line("#uavs"));
  hdr2 >> tag >> count;
  if (tag != "#uavs") throw std::runtime_error("scenario file: missing #uavs");
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream row(next_line("uav row"));
    UavState u;
    std::string x, y, h, hp;
    if (!(row >> u.id >> x >> y >> h >> hp))
      throw std::runtime_error("scenario file: malformed uav row");
    u.position = {parse_double(x), parse_double(y), parse_double(h)};
    u.hover_power = parse_double(hp);
    s.uavs.push_back(u);
  }
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << to_text(s);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return scenario_from_text(ss.str());
}

}  // namespace hnet
