#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "env.hpp"
#include "test_util.hpp"

using namespace hnet;
using hnet::test::close_rel;

namespace {

Env make_env(std::uint64_t seed = 7) {
  return Env(generate_scenario(hnet::test::desk_config(seed)));
}

// A no-op-ish action set: zero movement, keep the lowest SF/power indices.
std::vector<ActionCommand> idle_actions(const Env& env) {
  std::vector<ActionCommand> acts(env.num_agents());
  for (int u = 0; u < env.num_agents(); ++u) {
    acts[u].sf_choice.assign(env.cluster_members(u).size(), 0);
    acts[u].power_choice.assign(env.cluster_members(u).size(), 0);
  }
  return acts;
}

}  // namespace

TEST_CASE("reset is deterministic in the seed and redraws uav starts") {
  Env a = make_env();
  Env b = make_env();
  const StepResult ra = a.reset(42);
  const StepResult rb = b.reset(42);
  CHECK(ra.observations == rb.observations);
  CHECK(ra.global_state == rb.global_state);
  CHECK(ra.rewards == rb.rewards);

  const StepResult rc = a.reset(43);
  CHECK(rc.global_state != ra.global_state);

  // Devices come back to the lowest SF and power level.
  a.reset(42);
  for (const auto& d : a.devices()) {
    CHECK(d.sf == a.scenario().config.sf_set.front());
    CHECK(d.tx_power_dbm == a.scenario().config.power_set_dbm.front());
  }
}

TEST_CASE("observations are normalized into [0,1]") {
  Env env = make_env();
  StepResult r = env.reset(1);
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    for (int u = 0; u < env.num_agents(); ++u) {
      CHECK(r.observations[u].size() == env.obs_dim(u));
      for (double v : r.observations[u]) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(std::isfinite(v));
      }
    }
    auto acts = idle_actions(env);
    for (auto& a : acts) {
      for (auto& m : a.move_delta) m = rng.uniform(-1.0, 1.0);
      for (auto& s : a.sf_choice) s = static_cast<int>(rng.below(6));
      for (auto& p : a.power_choice) p = static_cast<int>(rng.below(5));
    }
    r = env.step(acts);
  }
}

TEST_CASE("degenerate feature families normalize to one half") {
  // After reset every device shares one SF and one power level, so those
  // two families are constant within each cluster.
  Env env = make_env();
  const StepResult r = env.reset(3);
  for (int u = 0; u < env.num_agents(); ++u) {
    const std::size_t n = env.cluster_members(u).size();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(r.observations[u][3 + 4 * i + 2] == 0.5);  // SF family
      CHECK(r.observations[u][3 + 4 * i + 3] == 0.5);  // power family
    }
  }
}

TEST_CASE("global state concatenates raw observations and uav positions") {
  Env env = make_env();
  const StepResult r = env.reset(9);
  CHECK(r.global_state.size() == env.global_state_dim());

  // The first three entries are agent 0's raw (unnormalized) UAV position,
  // and the trailing block repeats every UAV position verbatim.
  const auto& uavs = env.uavs();
  CHECK(r.global_state[0] == uavs[0].position[0]);
  CHECK(r.global_state[1] == uavs[0].position[1]);
  CHECK(r.global_state[2] == uavs[0].position[2]);
  const std::size_t tail = r.global_state.size() - 3 * uavs.size();
  for (std::size_t u = 0; u < uavs.size(); ++u)
    for (int k = 0; k < 3; ++k)
      CHECK(r.global_state[tail + 3 * u + k] == uavs[u].position[k]);
}

TEST_CASE("reward blends global and local efficiency") {
  Env env = make_env();
  StepResult r = env.reset(4);
  const double omega = env.scenario().config.reward_weight;
  for (int u = 0; u < env.num_agents(); ++u) {
    const double expect =
        omega * r.info.global_ee + (1.0 - omega) * r.info.local_ee[u];
    CHECK(close_rel(r.rewards[u], expect, 1e-12));
  }

  // Identity holds after arbitrary steps too.
  Rng rng(8);
  auto acts = idle_actions(env);
  for (auto& a : acts)
    for (auto& m : a.move_delta) m = rng.uniform(-1.0, 1.0);
  r = env.step(acts);
  for (int u = 0; u < env.num_agents(); ++u)
    CHECK(close_rel(r.rewards[u],
                    omega * r.info.global_ee + (1.0 - omega) * r.info.local_ee[u],
                    1e-12));

  // Sum of local terms equals the global figure.
  double sum = 0.0;
  for (double v : r.info.local_ee) sum += v;
  CHECK(close_rel(sum, r.info.global_ee, 1e-12));
}

TEST_CASE("reward weight endpoints") {
  ScenarioConfig cfg = hnet::test::desk_config(6);
  cfg.reward_weight = 1.0;  // fully shared reward
  Env shared(generate_scenario(cfg));
  StepResult r = shared.reset(2);
  for (double rw : r.rewards) CHECK(close_rel(rw, r.info.global_ee, 1e-12));

  cfg.reward_weight = 0.0;  // fully local
  Env local(generate_scenario(cfg));
  r = local.reset(2);
  for (int u = 0; u < local.num_agents(); ++u)
    CHECK(close_rel(r.rewards[u], r.info.local_ee[u], 1e-12));
}

TEST_CASE("step applies movement scaled by the step size and clamps bounds") {
  Env env = make_env();
  env.reset(11);
  const auto& cfg = env.scenario().config;
  const Vec3 before = env.uavs()[0].position;

  auto acts = idle_actions(env);
  acts[0].move_delta = {1.0, -1.0, 0.5};
  env.step(acts);
  const Vec3 after = env.uavs()[0].position;
  CHECK(after[0] == doctest::Approx(std::min(before[0] + cfg.step_size, cfg.area_x_max)));
  CHECK(after[1] == doctest::Approx(std::max(before[1] - cfg.step_size, 0.0)));
  CHECK(after[2] == doctest::Approx(std::clamp(before[2] + 0.5 * cfg.step_size,
                                               cfg.alt_min, cfg.alt_max)));

  // Oversized deltas behave like +-1 and altitude pins to the band.
  for (int t = 0; t < 10; ++t) {
    auto push = idle_actions(env);
    for (auto& a : push) a.move_delta = {5.0, 5.0, -9.0};
    env.step(push);
  }
  for (const auto& u : env.uavs()) {
    CHECK(u.position[0] <= cfg.area_x_max);
    CHECK(u.position[1] <= cfg.area_y_max);
    CHECK(u.position[2] == cfg.alt_min);
  }
}

TEST_CASE("step updates device link parameters from action indices") {
  Env env = make_env();
  env.reset(13);
  const auto& cfg = env.scenario().config;
  auto acts = idle_actions(env);
  acts[0].sf_choice[0] = 3;
  acts[0].power_choice[0] = 4;
  env.step(acts);
  const int dev = env.cluster_members(0)[0];
  CHECK(env.devices()[dev].sf == cfg.sf_set[3]);
  CHECK(env.devices()[dev].tx_power_dbm == cfg.power_set_dbm[4]);
}

TEST_CASE("identical actions from identical states give identical physics") {
  Env a = make_env();
  Env b = make_env();
  a.reset(21);
  b.reset(21);
  const auto acts = idle_actions(a);
  for (int t = 0; t < 5; ++t) {
    const StepResult ra = a.step(acts);
    const StepResult rb = b.step(acts);
    CHECK(ra.rewards == rb.rewards);
    CHECK(ra.info.global_ee == rb.info.global_ee);
    CHECK(ra.global_state == rb.global_state);
  }
}

TEST_CASE("efficiency reported by the env matches a direct recomputation") {
  Env env = make_env();
  const StepResult r = env.reset(17);
  std::vector<ClusterLinkState> clusters;
  for (int u = 0; u < env.num_agents(); ++u)
    clusters.push_back(env.cluster_link_state(u));
  const EnergyEfficiency ee =
      energy_efficiency(clusters, env.uavs(), env.scenario().config);
  CHECK(close_rel(r.info.global_ee, ee.global, 1e-12));
  for (int u = 0; u < env.num_agents(); ++u)
    CHECK(close_rel(r.info.local_ee[u], ee.per_uav[u], 1e-12));
}

TEST_CASE("episodes end after the configured number of steps") {
  ScenarioConfig cfg = hnet::test::desk_config(3);
  cfg.max_steps_per_episode = 5;
  Env env(generate_scenario(cfg));
  env.reset(1);
  const auto acts = idle_actions(env);
  for (int t = 0; t < 4; ++t) CHECK_FALSE(env.step(acts).done);
  CHECK(env.step(acts).done);
  CHECK_THROWS_AS(env.step(acts), std::logic_error);
  // A reset reopens the episode.
  env.reset(2);
  CHECK_FALSE(env.step(acts).done);
}

TEST_CASE("malformed actions are rejected") {
  Env env = make_env();
  env.reset(1);
  auto acts = idle_actions(env);

  auto too_few = acts;
  too_few.pop_back();
  CHECK_THROWS_AS(env.step(too_few), std::invalid_argument);

  auto short_sf = acts;
  short_sf[0].sf_choice.pop_back();
  CHECK_THROWS_AS(env.step(short_sf), std::invalid_argument);

  auto bad_sf = acts;
  bad_sf[0].sf_choice[0] = 6;
  CHECK_THROWS_AS(env.step(bad_sf), std::invalid_argument);

  auto bad_pw = acts;
  bad_pw[0].power_choice[0] = -1;
  CHECK_THROWS_AS(env.step(bad_pw), std::invalid_argument);

  auto nan_move = acts;
  nan_move[0].move_delta[0] = std::nan("");
  CHECK_THROWS_AS(env.step(nan_move), std::invalid_argument);

  // The rejecting step must not advance the episode.
  CHECK(env.step_count() == 0);
  env.step(acts);
  CHECK(env.step_count() == 1);
}

TEST_CASE("agents observe only their own cluster") {
  // Moving agent 1's devices' links (via its own action) must not change
  // agent 0's observation when agent 0 holds still.
  Env a = make_env();
  Env b = make_env();
  a.reset(30);
  b.reset(30);
  auto base = idle_actions(a);
  auto moved = base;
  moved[1].move_delta = {1.0, 1.0, 0.0};
  for (auto& s : moved[1].sf_choice) s = 5;
  const StepResult ra = a.step(base);
  const StepResult rb = b.step(moved);
  CHECK(ra.observations[0] == rb.observations[0]);
  CHECK(ra.observations[1] != rb.observations[1]);
  // The shared reward component does change: couplings flow through EE only.
  CHECK(ra.rewards[0] != rb.rewards[0]);
}
