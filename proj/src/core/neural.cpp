#include "neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace hnet {

namespace {

constexpr double kLogStdMin = -5.0;
constexpr double kLogStdMax = 1.0;
constexpr double kTanhEps = 1e-6;
constexpr double kHalfLog2Pi = 0.9189385332046727;  // 0.5*log(2*pi)

void softmax(const double* logits, int n, std::vector<double>& probs) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  probs.resize(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - mx);
    sum += probs[i];
  }
  for (int i = 0; i < n; ++i) probs[i] /= sum;
}

}  // namespace

Mlp::Mlp(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.size() < 2) throw std::invalid_argument("Mlp needs >= 2 dims");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    layer_offsets_.push_back(total);
    total += static_cast<std::size_t>(dims_[l + 1]) * dims_[l] + dims_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::init(std::vector<int> dims, Rng& rng, double hidden_gain,
              double output_gain) {
  Mlp mlp(std::move(dims));
  const std::size_t num_layers = mlp.dims_.size() - 1;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const int rows = mlp.dims_[l + 1];
    const int cols = mlp.dims_[l];
    const double gain = (l + 1 == num_layers) ? output_gain : hidden_gain;
    // Gaussian draw, then modified Gram-Schmidt over the rows (or columns
    // when rows > cols, via the transposed view).
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (auto& x : w) x = rng.normal();
    const bool by_rows = rows <= cols;
    const int nvec = by_rows ? rows : cols;
    const int veclen = by_rows ? cols : rows;
    auto at = [&](int vec, int k) -> double& {
      return by_rows ? w[static_cast<std::size_t>(vec) * cols + k]
                     : w[static_cast<std::size_t>(k) * cols + vec];
    };
    for (int i = 0; i < nvec; ++i) {
      for (int j = 0; j < i; ++j) {
        double dot = 0.0;
        for (int k = 0; k < veclen; ++k) dot += at(i, k) * at(j, k);
        for (int k = 0; k < veclen; ++k) at(i, k) -= dot * at(j, k);
      }
      double norm = 0.0;
      for (int k = 0; k < veclen; ++k) norm += at(i, k) * at(i, k);
      norm = std::sqrt(std::max(norm, 1e-30));
      for (int k = 0; k < veclen; ++k) at(i, k) /= norm;
    }
    double* dst = mlp.params_.data() + mlp.layer_offsets_[l];
    for (std::size_t i = 0; i < w.size(); ++i) dst[i] = gain * w[i];
    // biases stay zero
  }
  return mlp;
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  Cache cache;
  return forward(input, cache);
}

std::vector<double> Mlp::forward(const std::vector<double>& input,
                                 Cache& cache) const {
  if (static_cast<int>(input.size()) != dims_.front())
    throw std::invalid_argument("Mlp::forward: input dimension mismatch");
  cache.input = input;
  cache.pre.clear();
  cache.post.clear();
  const double* x = input.data();
  int in_dim = dims_.front();
  std::vector<double> cur;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    const int out_dim = dims_[l + 1];
    const double* w = params_.data() + layer_offsets_[l];
    const double* b = w + static_cast<std::size_t>(out_dim) * in_dim;
    std::vector<double> pre(out_dim);
    for (int o = 0; o < out_dim; ++o) {
      const double* row = w + static_cast<std::size_t>(o) * in_dim;
      double acc = b[o];
      for (int i = 0; i < in_dim; ++i) acc += row[i] * x[i];
      pre[o] = acc;
    }
    cache.pre.push_back(pre);
    const bool last = (l + 2 == dims_.size());
    if (!last)
      for (auto& v : pre) v = std::max(v, 0.0);
    cache.post.push_back(pre);
    cur = std::move(pre);
    x = cur.data();
    in_dim = out_dim;
  }
  return cur;
}

void Mlp::backward(const Cache& cache, const std::vector<double>& upstream,
                   std::vector<double>& grads) const {
  if (cache.pre.size() != dims_.size() - 1)
    throw std::logic_error("Mlp::backward: no cached forward pass");
  if (static_cast<int>(upstream.size()) != dims_.back())
    throw std::invalid_argument("Mlp::backward: upstream dimension mismatch");
  if (grads.size() != params_.size()) grads.resize(params_.size(), 0.0);

  std::vector<double> delta = upstream;  // d loss / d pre-activation
  for (int l = static_cast<int>(dims_.size()) - 2; l >= 0; --l) {
    const int out_dim = dims_[l + 1];
    const int in_dim = dims_[l];
    const double* x = l == 0 ? cache.input.data() : cache.post[l - 1].data();
    const double* w = params_.data() + layer_offsets_[l];
    double* gw = grads.data() + layer_offsets_[l];
    double* gb = gw + static_cast<std::size_t>(out_dim) * in_dim;
    for (int o = 0; o < out_dim; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) grow[i] += d * x[i];
    }
    if (l > 0) {
      std::vector<double> prev(in_dim, 0.0);
      for (int o = 0; o < out_dim; ++o) {
        const double d = delta[o];
        const double* row = w + static_cast<std::size_t>(o) * in_dim;
        for (int i = 0; i < in_dim; ++i) prev[i] += d * row[i];
      }
      // relu derivative from the previous layer's pre-activations
      for (int i = 0; i < in_dim; ++i)
        if (cache.pre[l - 1][i] <= 0.0) prev[i] = 0.0;
      delta = std::move(prev);
    }
  }
}

Adam::Adam(std::size_t param_count, double beta1, double beta2, double eps)
    : m_(param_count, 0.0), v_(param_count, 0.0),
      beta1_(beta1), beta2_(beta2), eps_(eps) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads,
                double lr) {
  if (params.size() != m_.size() || grads.size() != m_.size())
    throw std::invalid_argument("Adam::step: size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps_);
  }
}

void clip_grad_norm(std::vector<double>& grads, double max_norm) {
  double sq = 0.0;
  for (double g : grads) sq += g * g;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (double& g : grads) g *= scale;
  }
}

PolicyHeads::PolicyHeads(int obs_dim, int hidden, int num_devices,
                         int sf_count, int power_count, Rng& rng)
    : trunk_(Mlp::init({obs_dim, hidden, hidden,
                        3 + num_devices * (sf_count + power_count)},
                       rng, std::numbers::sqrt2, 0.01)),
      log_std_(3, -0.5),
      num_devices_(num_devices),
      sf_count_(sf_count),
      power_count_(power_count) {}

double PolicyHeads::clamped_log_std(int i) const {
  return std::clamp(log_std_[i], kLogStdMin, kLogStdMax);
}

PolicyHeads::Sample PolicyHeads::sample(const std::vector<double>& obs,
                                        Rng& rng) const {
  const std::vector<double> out = trunk_.forward(obs);
  Sample s;
  s.action.sf_choice.resize(num_devices_);
  s.action.power_choice.resize(num_devices_);
  for (int i = 0; i < 3; ++i) {
    const double mu = out[i];
    const double sigma = std::exp(clamped_log_std(i));
    const double z = mu + sigma * rng.normal();
    const double a = std::tanh(z);
    s.pre_tanh[i] = z;
    s.action.move_delta[i] = a;
    s.log_prob += -0.5 * ((z - mu) / sigma) * ((z - mu) / sigma) -
                  clamped_log_std(i) - kHalfLog2Pi -
                  std::log(1.0 - a * a + kTanhEps);
    s.entropy += 0.5 + kHalfLog2Pi + clamped_log_std(i);
  }
  std::vector<double> probs;
  int off = 3;
  for (int d = 0; d < num_devices_; ++d) {
    softmax(out.data() + off, sf_count_, probs);
    const int idx = static_cast<int>(rng.categorical(probs));
    s.action.sf_choice[d] = idx;
    s.log_prob += std::log(probs[idx]);
    for (double p : probs)
      if (p > 0.0) s.entropy -= p * std::log(p);
    off += sf_count_;
  }
  for (int d = 0; d < num_devices_; ++d) {
    softmax(out.data() + off, power_count_, probs);
    const int idx = static_cast<int>(rng.categorical(probs));
    s.action.power_choice[d] = idx;
    s.log_prob += std::log(probs[idx]);
    for (double p : probs)
      if (p > 0.0) s.entropy -= p * std::log(p);
    off += power_count_;
  }
  return s;
}

ActionCommand PolicyHeads::mode(const std::vector<double>& obs) const {
  const std::vector<double> out = trunk_.forward(obs);
  ActionCommand a;
  for (int i = 0; i < 3; ++i) a.move_delta[i] = std::tanh(out[i]);
  int off = 3;
  for (int d = 0; d < num_devices_; ++d) {
    const double* logits = out.data() + off;
    a.sf_choice.push_back(static_cast<int>(
        std::max_element(logits, logits + sf_count_) - logits));
    off += sf_count_;
  }
  for (int d = 0; d < num_devices_; ++d) {
    const double* logits = out.data() + off;
    a.power_choice.push_back(static_cast<int>(
        std::max_element(logits, logits + power_count_) - logits));
    off += power_count_;
  }
  return a;
}

PolicyHeads::Eval PolicyHeads::evaluate(const std::vector<double>& obs,
                                        const std::array<double, 3>& pre_tanh,
                                        const std::vector<int>& sf_choice,
                                        const std::vector<int>& power_choice) const {
  if (static_cast<int>(sf_choice.size()) != num_devices_ ||
      static_cast<int>(power_choice.size()) != num_devices_)
    throw std::invalid_argument("PolicyHeads::evaluate: choice length mismatch");
  Eval e;
  e.output = trunk_.forward(obs, e.cache);
  e.pre_tanh = pre_tanh;
  e.sf_choice = sf_choice;
  e.power_choice = power_choice;
  for (int i = 0; i < 3; ++i) {
    const double mu = e.output[i];
    const double sigma = std::exp(clamped_log_std(i));
    const double z = pre_tanh[i];
    const double a = std::tanh(z);
    e.log_prob += -0.5 * ((z - mu) / sigma) * ((z - mu) / sigma) -
                  clamped_log_std(i) - kHalfLog2Pi -
                  std::log(1.0 - a * a + kTanhEps);
    e.entropy += 0.5 + kHalfLog2Pi + clamped_log_std(i);
  }
  std::vector<double> probs;
  int off = 3;
  for (int d = 0; d < num_devices_; ++d) {
    softmax(e.output.data() + off, sf_count_, probs);
    e.log_prob += std::log(probs[sf_choice[d]]);
    for (double p : probs)
      if (p > 0.0) e.entropy -= p * std::log(p);
    off += sf_count_;
  }
  for (int d = 0; d < num_devices_; ++d) {
    softmax(e.output.data() + off, power_count_, probs);
    e.log_prob += std::log(probs[power_choice[d]]);
    for (double p : probs)
      if (p > 0.0) e.entropy -= p * std::log(p);
    off += power_count_;
  }
  return e;
}

void PolicyHeads::backward(const Eval& e, double d_logp, double d_entropy,
                           std::vector<double>& trunk_grads,
                           std::vector<double>& log_std_grads) const {
  std::vector<double> upstream(e.output.size(), 0.0);
  if (log_std_grads.size() != log_std_.size())
    log_std_grads.resize(log_std_.size(), 0.0);

  for (int i = 0; i < 3; ++i) {
    const double mu = e.output[i];
    const double sigma = std::exp(clamped_log_std(i));
    const double zs = (e.pre_tanh[i] - mu) / sigma;
    upstream[i] = d_logp * zs / sigma;  // d logp / d mu
    // log_std is clamped on use; gradient passes only inside the clamp range
    if (log_std_[i] > kLogStdMin && log_std_[i] < kLogStdMax)
      log_std_grads[i] += d_logp * (zs * zs - 1.0) + d_entropy;
  }
  std::vector<double> probs;
  int off = 3;
  auto head = [&](int n, int chosen) {
    softmax(e.output.data() + off, n, probs);
    double h = 0.0;
    for (double p : probs)
      if (p > 0.0) h -= p * std::log(p);
    for (int j = 0; j < n; ++j) {
      const double logp_j = probs[j] > 0.0 ? std::log(probs[j]) : -745.0;
      upstream[off + j] = d_logp * ((j == chosen ? 1.0 : 0.0) - probs[j]) +
                          d_entropy * (-probs[j] * (logp_j + h));
    }
    off += n;
  };
  for (int d = 0; d < num_devices_; ++d) head(sf_count_, e.sf_choice[d]);
  for (int d = 0; d < num_devices_; ++d) head(power_count_, e.power_choice[d]);

  trunk_.backward(e.cache, upstream, trunk_grads);
}

ValueNet::ValueNet(int state_dim, int hidden, Rng& rng)
    : net_(Mlp::init({state_dim, hidden, hidden, 1}, rng, std::numbers::sqrt2,
                     1.0)) {}

double ValueNet::value(const std::vector<double>& state) const {
  return net_.forward(state)[0];
}

double ValueNet::value(const std::vector<double>& state, Mlp::Cache& cache) const {
  return net_.forward(state, cache)[0];
}

void ValueNet::backward(const Mlp::Cache& cache, double d_value,
                        std::vector<double>& grads) const {
  net_.backward(cache, {d_value}, grads);
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write("HNETCKPT1\n", 10);
  auto write_u64 = [&](std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(buf, 8);
  };
  write_u64(ckpt.size());
  for (const auto& [name, data] : ckpt) {
    write_u64(name.size());
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_u64(data.size());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[10];
  in.read(magic, 10);
  if (!in || std::memcmp(magic, "HNETCKPT1\n", 10) != 0)
    throw std::runtime_error("not a heteronet checkpoint: " + path);
  auto read_u64 = [&]() {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  };
  Checkpoint ckpt;
  const std::uint64_t count = read_u64();
  for (std::uint64_t i = 0; i < count && in; ++i) {
    std::string name(read_u64(), '\0');
    in.read(name.data(), static_cast<std::streamsize>(name.size()));
    std::vector<double> data(read_u64());
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
    ckpt.emplace_back(std::move(name), std::move(data));
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  return ckpt;
}

}  // namespace hnet
