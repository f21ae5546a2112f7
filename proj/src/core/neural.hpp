#ifndef HNET_NEURAL_HPP_
#define HNET_NEURAL_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "env.hpp"
#include "rng.hpp"

namespace hnet {

// Fully connected network with rectified-linear hidden layers and an
// identity output layer. Parameters live in one flat vector (per layer:
// row-major weights [out][in], then biases) so the optimizer and the
// checkpoint format can treat every network uniformly.
class Mlp {
 public:
  explicit Mlp(std::vector<int> dims);

  // Orthogonal weight initialization (modified Gram-Schmidt on a Gaussian
  // draw), gain on hidden layers and a separate gain on the output layer.
  static Mlp init(std::vector<int> dims, Rng& rng, double hidden_gain,
                  double output_gain);

  struct Cache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;   // pre-activation per layer
    std::vector<std::vector<double>> post;  // post-activation per layer
  };

  std::vector<double> forward(const std::vector<double>& input) const;
  std::vector<double> forward(const std::vector<double>& input, Cache& cache) const;

  // Accumulates d(output . upstream)/d(params) into grads (flat, same layout
  // as params()). Requires the cache of the matching forward pass.
  void backward(const Cache& cache, const std::vector<double>& upstream,
                std::vector<double>& grads) const;

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

 private:
  std::vector<int> dims_;
  std::vector<double> params_;
  std::vector<std::size_t> layer_offsets_;  // start of each layer's block
};

// Adaptive moment estimation with bias correction.
class Adam {
 public:
  explicit Adam(std::size_t param_count, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8);
  void step(std::vector<double>& params, const std::vector<double>& grads,
            double lr);

 private:
  std::vector<double> m_, v_;
  double beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
};

// Scales grads in place so their global L2 norm is at most max_norm.
void clip_grad_norm(std::vector<double>& grads, double max_norm);

// Factorized policy for one agent: a shared trunk whose output splits into
// a 3-component Gaussian movement head (tanh-squashed, state-independent
// learned log-stddev) and per-device categorical heads for spreading factor
// and power level.
class PolicyHeads {
 public:
  PolicyHeads(int obs_dim, int hidden, int num_devices, int sf_count,
              int power_count, Rng& rng);

  struct Sample {
    ActionCommand action;
    std::array<double, 3> pre_tanh;  // Gaussian sample before squashing
    double log_prob = 0.0;
    double entropy = 0.0;
  };

  struct Eval {
    double log_prob = 0.0;
    double entropy = 0.0;
    Mlp::Cache cache;
    std::vector<double> output;
    // Stored action being evaluated:
    std::array<double, 3> pre_tanh{};
    std::vector<int> sf_choice, power_choice;
  };

  Sample sample(const std::vector<double>& obs, Rng& rng) const;

  // Greedy action: tanh of the mean, argmax of each categorical head.
  ActionCommand mode(const std::vector<double>& obs) const;

  // Log-prob and entropy of a stored action under the current parameters,
  // with everything cached for backward().
  Eval evaluate(const std::vector<double>& obs,
                const std::array<double, 3>& pre_tanh,
                const std::vector<int>& sf_choice,
                const std::vector<int>& power_choice) const;

  // Accumulates gradients of (d_logp * log_prob + d_entropy * entropy)
  // w.r.t. trunk params and log-stddev params.
  void backward(const Eval& eval, double d_logp, double d_entropy,
                std::vector<double>& trunk_grads,
                std::vector<double>& log_std_grads) const;

  Mlp& trunk() { return trunk_; }
  const Mlp& trunk() const { return trunk_; }
  std::vector<double>& log_std() { return log_std_; }
  const std::vector<double>& log_std() const { return log_std_; }
  int num_devices() const { return num_devices_; }
  int sf_count() const { return sf_count_; }
  int power_count() const { return power_count_; }

 private:
  double clamped_log_std(int i) const;

  Mlp trunk_;
  std::vector<double> log_std_;  // 3 values, clamped to [-5, 1] on use
  int num_devices_, sf_count_, power_count_;
};

// Centralized critic: global state -> scalar value.
class ValueNet {
 public:
  ValueNet(int state_dim, int hidden, Rng& rng);
  double value(const std::vector<double>& state) const;
  double value(const std::vector<double>& state, Mlp::Cache& cache) const;
  // Gradient of (d_value * value) w.r.t. params.
  void backward(const Mlp::Cache& cache, double d_value,
                std::vector<double>& grads) const;
  Mlp& net() { return net_; }
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

// Checkpoint: named flat float64 tensors. Layout: magic "HNETCKPT1\n",
// u64 tensor count, then per tensor u64 name length, name bytes, u64 value
// count, little-endian IEEE-754 doubles.
using Checkpoint = std::vector<std::pair<std::string, std::vector<double>>>;
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hnet

#endif  // HNET_NEURAL_HPP_
