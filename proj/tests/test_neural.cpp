#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "neural.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace hnet;
using hnet::test::close_rel;

namespace {

// |a-b| within atol + rtol*scale; used for gradient comparisons where some
// components are legitimately near zero.
bool grad_close(double a, double b, double tol = 1e-6) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

TEST_CASE("freshly constructed network is the zero function") {
  Mlp mlp({4, 8, 2});
  const auto out = mlp.forward({1.0, -2.0, 3.0, 0.5});
  REQUIRE(out.size() == 2);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("single-layer forward is an affine map") {
  Mlp mlp({2, 2});
  // Layout: row-major weights then biases.
  mlp.params() = {1.0, 2.0, 3.0, 4.0, 0.5, -0.5};
  const auto out = mlp.forward({1.0, -1.0});
  CHECK(out[0] == doctest::Approx(1.0 - 2.0 + 0.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(3.0 - 4.0 - 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(mlp.forward({1.0}), std::invalid_argument);
}

TEST_CASE("hidden layers rectify, output layer does not") {
  Mlp mlp({1, 2, 1});
  // W1 = [[1],[-1]], b1 = [0,0]; W2 = [[1,1]], b2 = [-3].
  mlp.params() = {1.0, -1.0, 0.0, 0.0, 1.0, 1.0, -3.0};
  // x=2: hidden pre = (2,-2) -> post (2,0) -> out 2-3 = -1 (no output relu).
  CHECK(mlp.forward({2.0})[0] == doctest::Approx(-1.0).epsilon(1e-15));
  // x=-2: hidden (0,2) -> out 2-3 = -1.
  CHECK(mlp.forward({-2.0})[0] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("orthogonal initialization gives orthonormal rows times gain") {
  Rng rng(31);
  const double gain = 1.7;
  Mlp mlp = Mlp::init({8, 4}, rng, 99.0, gain);  // single layer: output gain
  const auto& p = mlp.params();
  // Rows of the 4x8 weight block.
  for (int r = 0; r < 4; ++r) {
    for (int s = 0; s <= r; ++s) {
      double d = 0.0;
      for (int k = 0; k < 8; ++k) d += p[r * 8 + k] * p[s * 8 + k];
      CHECK(d == doctest::Approx(r == s ? gain * gain : 0.0).epsilon(1e-10));
    }
  }
  for (int b = 0; b < 4; ++b) CHECK(p[32 + b] == 0.0);  // zero biases

  // Tall layer: columns orthonormal instead.
  Mlp tall = Mlp::init({3, 6}, rng, 99.0, 1.0);
  const auto& q = tall.params();
  for (int c = 0; c < 3; ++c) {
    double d = 0.0;
    for (int r = 0; r < 6; ++r) d += q[r * 3 + c] * q[r * 3 + c];
    CHECK(d == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(17);
  Mlp mlp = Mlp::init({3, 5, 4, 2}, rng, std::sqrt(2.0), 1.0);
  // Nonzero biases so their gradients are exercised too.
  for (auto& v : mlp.params()) v += 0.01;
  const std::vector<double> x = {0.3, -0.7, 1.2};
  const std::vector<double> upstream = {0.8, -1.3};

  Mlp::Cache cache;
  mlp.forward(x, cache);
  std::vector<double> grads(mlp.params().size(), 0.0);
  mlp.backward(cache, upstream, grads);

  const double h = 1e-6;
  for (std::size_t i = 0; i < mlp.params().size(); ++i) {
    const double keep = mlp.params()[i];
    mlp.params()[i] = keep + h;
    const double up = dot(mlp.forward(x), upstream);
    mlp.params()[i] = keep - h;
    const double dn = dot(mlp.forward(x), upstream);
    mlp.params()[i] = keep;
    CHECK(grad_close(grads[i], (up - dn) / (2.0 * h)));
  }
}

TEST_CASE("backward accumulates rather than overwrites") {
  Rng rng(2);
  Mlp mlp = Mlp::init({2, 3, 1}, rng, 1.0, 1.0);
  Mlp::Cache cache;
  mlp.forward({0.5, -0.5}, cache);
  std::vector<double> once(mlp.params().size(), 0.0);
  mlp.backward(cache, {1.0}, once);
  std::vector<double> twice(mlp.params().size(), 0.0);
  mlp.backward(cache, {1.0}, twice);
  mlp.backward(cache, {1.0}, twice);
  for (std::size_t i = 0; i < once.size(); ++i)
    CHECK(twice[i] == doctest::Approx(2.0 * once[i]).epsilon(1e-12));

  CHECK_THROWS_AS(mlp.backward(cache, {1.0, 2.0}, once), std::invalid_argument);
}

TEST_CASE("adam first step moves by roughly lr per coordinate") {
  std::vector<double> params = {1.0, -2.0, 0.0};
  const std::vector<double> grads = {10.0, -0.3, 0.0};
  Adam opt(3);
  opt.step(params, grads, 1e-3);
  // Bias-corrected first step: lr * g / (|g| + eps) ~ lr * sign(g).
  CHECK(params[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(params[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
  CHECK(params[2] == 0.0);  // zero gradient leaves the weight alone
}

TEST_CASE("adam is deterministic and stateful") {
  std::vector<double> a = {1.0}, b = {1.0};
  Adam oa(1), ob(1);
  for (int t = 0; t < 50; ++t) {
    oa.step(a, {0.5}, 1e-2);
    ob.step(b, {0.5}, 1e-2);
  }
  CHECK(a[0] == b[0]);
  // Constant gradient keeps pushing in the same direction.
  CHECK(a[0] < 1.0 - 0.4);

  CHECK_THROWS_AS(oa.step(a, {1.0, 2.0}, 1e-2), std::invalid_argument);
}

TEST_CASE("gradient clipping rescales only above the threshold") {
  std::vector<double> g = {3.0, 4.0};  // norm 5
  clip_grad_norm(g, 10.0);
  CHECK(g[0] == 3.0);
  CHECK(g[1] == 4.0);
  clip_grad_norm(g, 1.0);
  CHECK(std::sqrt(g[0] * g[0] + g[1] * g[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g[0] / g[1] == doctest::Approx(0.75).epsilon(1e-12));

  std::vector<double> zero = {0.0, 0.0};
  clip_grad_norm(zero, 1.0);
  CHECK(zero[0] == 0.0);
}

TEST_CASE("sampled actions re-evaluate to the same log-prob and entropy") {
  Rng init(4);
  PolicyHeads pi(10, 16, 3, 6, 5, init);
  Rng rng(5);
  std::vector<double> obs(10);
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& v : obs) v = rng.uniform(0.0, 1.0);
    const auto s = pi.sample(obs, rng);
    CHECK(s.action.sf_choice.size() == 3);
    CHECK(s.action.power_choice.size() == 3);
    for (double m : s.action.move_delta) {
      CHECK(m > -1.0);
      CHECK(m < 1.0);
    }
    const auto e = pi.evaluate(obs, s.pre_tanh, s.action.sf_choice,
                               s.action.power_choice);
    CHECK(close_rel(e.log_prob, s.log_prob, 1e-12));
    CHECK(close_rel(e.entropy, s.entropy, 1e-12));
    CHECK(std::isfinite(s.log_prob));
  }
}

TEST_CASE("near-zero stddev collapses sampling onto the mode") {
  Rng init(6);
  PolicyHeads pi(4, 8, 0, 6, 5, init);
  for (auto& v : pi.log_std()) v = -20.0;  // clamps to -5, sigma ~ 6.7e-3
  Rng rng(7);
  const std::vector<double> obs = {0.2, 0.4, 0.6, 0.8};
  const ActionCommand mode = pi.mode(obs);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = pi.sample(obs, rng);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(s.action.move_delta[i] - mode.move_delta[i]) < 0.05);
  }
}

TEST_CASE("a dominant logit is sampled almost always") {
  Rng init(8);
  PolicyHeads pi(2, 4, 1, 6, 5, init);
  // Zero the trunk, then bias the output layer: SF head index 2 gets +20.
  auto& p = pi.trunk().params();
  std::fill(p.begin(), p.end(), 0.0);
  const int out_dim = pi.trunk().output_dim();
  const std::size_t last_bias = p.size() - out_dim;
  p[last_bias + 3 + 2] = 20.0;  // logits start after the 3 movement means

  Rng rng(9);
  const std::vector<double> obs = {0.5, 0.5};
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) hits += pi.sample(obs, rng).action.sf_choice[0] == 2;
  CHECK(static_cast<double>(hits) / n > 0.999);
  CHECK(pi.mode(obs).sf_choice[0] == 2);
  // Power head untouched: argmax of all-zero logits is index 0 and sampling
  // stays near uniform.
  CHECK(pi.mode(obs).power_choice[0] == 0);
}

TEST_CASE("uniform logits sample categorically uniform") {
  Rng init(10);
  PolicyHeads pi(2, 4, 1, 6, 5, init);
  std::fill(pi.trunk().params().begin(), pi.trunk().params().end(), 0.0);
  Rng rng(11);
  const std::vector<double> obs = {0.1, 0.9};
  std::vector<int> counts(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++counts[pi.sample(obs, rng).action.sf_choice[0]];
  for (int c : counts)
    CHECK(std::abs(static_cast<double>(c) / n - 1.0 / 6.0) < 0.01);
}

TEST_CASE("squashed gaussian density integrates to one") {
  // Trunk zeroed: movement mean 0, stddev exp(-0.5), no categorical heads.
  Rng init(12);
  PolicyHeads pi(2, 4, 0, 6, 5, init);
  std::fill(pi.trunk().params().begin(), pi.trunk().params().end(), 0.0);
  const std::vector<double> obs = {0.3, 0.7};

  // The three movement coordinates are iid here, so the total log-prob at
  // (z, 0, 0) decomposes as f(z) + 2 f(0).
  auto logp = [&](double z) {
    return pi.evaluate(obs, {z, 0.0, 0.0}, {}, {}).log_prob;
  };
  const double f0 = logp(0.0) / 3.0;

  const double sigma = std::exp(-0.5);
  const double lo = -10.0 * sigma, hi = 10.0 * sigma;
  const int n = 4000;  // Simpson, even interval count
  const double h = (hi - lo) / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = lo + i * h;
    const double a = std::tanh(z);
    // density over the squashed variable, pulled back to z
    const double val = std::exp(logp(z) - 2.0 * f0) * (1.0 - a * a);
    integral += val * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  integral *= h / 3.0;
  CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("policy gradients match finite differences") {
  Rng init(13);
  PolicyHeads pi(5, 8, 2, 6, 5, init);
  Rng rng(14);
  std::vector<double> obs(5);
  for (auto& v : obs) v = rng.uniform(0.0, 1.0);
  const auto s = pi.sample(obs, rng);

  const double c_logp = 0.7, c_ent = -0.3;
  const auto eval = pi.evaluate(obs, s.pre_tanh, s.action.sf_choice,
                                s.action.power_choice);
  std::vector<double> g_trunk(pi.trunk().params().size(), 0.0);
  std::vector<double> g_std(pi.log_std().size(), 0.0);
  pi.backward(eval, c_logp, c_ent, g_trunk, g_std);

  auto loss = [&]() {
    const auto e = pi.evaluate(obs, s.pre_tanh, s.action.sf_choice,
                               s.action.power_choice);
    return c_logp * e.log_prob + c_ent * e.entropy;
  };
  const double h = 1e-6;
  auto& tp = pi.trunk().params();
  for (std::size_t i = 0; i < tp.size(); i += 7) {  // every 7th weight
    const double keep = tp[i];
    tp[i] = keep + h;
    const double up = loss();
    tp[i] = keep - h;
    const double dn = loss();
    tp[i] = keep;
    CHECK(grad_close(g_trunk[i], (up - dn) / (2.0 * h)));
  }
  for (std::size_t i = 0; i < pi.log_std().size(); ++i) {
    const double keep = pi.log_std()[i];
    pi.log_std()[i] = keep + h;
    const double up = loss();
    pi.log_std()[i] = keep - h;
    const double dn = loss();
    pi.log_std()[i] = keep;
    CHECK(grad_close(g_std[i], (up - dn) / (2.0 * h)));
  }
}

TEST_CASE("log-std gradient is blocked outside the clamp range") {
  Rng init(15);
  PolicyHeads pi(3, 4, 0, 6, 5, init);
  pi.log_std() = {-7.0, 0.0, 3.0};  // below, inside, above
  Rng rng(16);
  const std::vector<double> obs = {0.1, 0.2, 0.3};
  const auto s = pi.sample(obs, rng);
  const auto e = pi.evaluate(obs, s.pre_tanh, {}, {});
  std::vector<double> g_trunk(pi.trunk().params().size(), 0.0);
  std::vector<double> g_std(3, 0.0);
  pi.backward(e, 1.0, 0.0, g_trunk, g_std);
  CHECK(g_std[0] == 0.0);
  CHECK(g_std[2] == 0.0);
}

TEST_CASE("value network gradient matches finite differences") {
  Rng init(18);
  ValueNet v(6, 8, init);
  Rng rng(19);
  std::vector<double> state(6);
  for (auto& x : state) x = rng.uniform(-1.0, 1.0);

  Mlp::Cache cache;
  v.value(state, cache);
  std::vector<double> grads(v.net().params().size(), 0.0);
  v.backward(cache, 2.5, grads);

  const double h = 1e-6;
  auto& p = v.net().params();
  for (std::size_t i = 0; i < p.size(); i += 5) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = 2.5 * v.value(state);
    p[i] = keep - h;
    const double dn = 2.5 * v.value(state);
    p[i] = keep;
    CHECK(grad_close(grads[i], (up - dn) / (2.0 * h)));
  }
}

TEST_CASE("checkpoints round-trip bit for bit") {
  namespace fs = std::filesystem;
  Checkpoint ckpt;
  Rng rng(20);
  std::vector<double> t1(37), t2(5);
  for (auto& v : t1) v = rng.normal();
  for (auto& v : t2) v = rng.normal() * 1e300;  // extreme magnitudes survive
  t2[0] = 0.0;
  t2[1] = -0.0;
  ckpt.emplace_back("actor0.trunk", t1);
  ckpt.emplace_back("critic.net", t2);

  const fs::path path = fs::temp_directory_path() / "hnet_ckpt_test.bin";
  save_checkpoint(ckpt, path.string());
  const Checkpoint back = load_checkpoint(path.string());
  REQUIRE(back.size() == 2);
  CHECK(back[0].first == "actor0.trunk");
  CHECK(back[1].first == "critic.net");
  CHECK(back[0].second == t1);
  CHECK(back[1].second == t2);

  // Corrupt magic.
  {
    std::ofstream f(path, std::ios::binary);
    f << "NOTACKPT!!";
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), std::runtime_error);
  fs::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path.string()), std::runtime_error);
}
