#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "pasym/errors.hpp"
#include "pasym/json_io.hpp"
#include "pasym/random.hpp"

namespace pasym {

enum class Activation { kTanh, kRelu };

inline const char* to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "relu";
}
inline Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "relu") return Activation::kRelu;
  throw DomainError("unknown activation '" + s + "'");
}

struct TrainConfig {
  double lr = 1e-3;
  int epochs = 2000;
  int batch = 0;  // 0: full batch below 4096 samples, else minibatches of 4096
  std::uint64_t seed = 1;
  double val_fraction = 0.2;
  std::string optimizer = "adam";
  std::string lr_schedule = "constant";  // or "cosine"
  std::vector<int> hidden{20, 20, 20};
  std::string activation = "tanh";

  void validate() const {
    if (!(lr > 0.0)) throw DomainError("TrainConfig: learning rate must be positive");
    if (epochs < 0) throw DomainError("TrainConfig: epochs must be >= 0");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
      throw DomainError("TrainConfig: val_fraction in [0,1)");
    if (optimizer != "adam" && optimizer != "sgd")
      throw DomainError("TrainConfig: unknown optimizer '" + optimizer + "'");
    if (lr_schedule != "constant" && lr_schedule != "cosine")
      throw DomainError("TrainConfig: unknown lr_schedule '" + lr_schedule + "'");
  }

  /// Per-epoch learning-rate factor in [0, 1].
  double lr_scale(int epoch) const {
    if (lr_schedule == "constant") return 1.0;
    constexpr double kPi = 3.14159265358979323846;
    return 0.5 * (1.0 + std::cos(kPi * epoch / std::max(1, epochs)));
  }

  Json to_json() const {
    Json j;
    j["lr"] = lr;
    j["epochs"] = epochs;
    j["batch"] = batch;
    j["seed"] = seed;
    j["val_fraction"] = val_fraction;
    j["optimizer"] = optimizer;
    j["lr_schedule"] = lr_schedule;
    j["hidden"] = hidden;
    j["activation"] = activation;
    return j;
  }
  static TrainConfig from_json(const Json& j) {
    TrainConfig c;
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("batch")) c.batch = j.at("batch").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("val_fraction")) c.val_fraction = j.at("val_fraction").get<double>();
    if (j.contains("optimizer")) c.optimizer = j.at("optimizer").get<std::string>();
    if (j.contains("lr_schedule")) c.lr_schedule = j.at("lr_schedule").get<std::string>();
    if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
    if (j.contains("activation")) c.activation = j.at("activation").get<std::string>();
    c.validate();
    return c;
  }
};

/// Dense multilayer perceptron with analytic backpropagation. Widths include
/// the input and output layers. Weights are row-major (out x in) per layer.
class Mlp {
 public:
  Mlp() = default;

  static Mlp init(int in_width, int out_width, const std::vector<int>& hidden,
                  Activation act, std::uint64_t seed) {
    Mlp m;
    m.act_ = act;
    m.seed_ = seed;
    m.widths_.push_back(in_width);
    for (int h : hidden) m.widths_.push_back(h);
    m.widths_.push_back(out_width);
    rng::Engine eng(seed);
    for (std::size_t l = 0; l + 1 < m.widths_.size(); ++l) {
      const int fan_in = m.widths_[l], fan_out = m.widths_[l + 1];
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
      for (auto& x : w) x = eng.uniform(-limit, limit);
      m.w_.push_back(std::move(w));
      m.b_.emplace_back(fan_out, 0.0);
    }
    return m;
  }

  const std::vector<int>& widths() const { return widths_; }
  int in_width() const { return widths_.front(); }
  int out_width() const { return widths_.back(); }
  Activation activation() const { return act_; }
  std::uint64_t seed() const { return seed_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < w_.size(); ++l) n += w_[l].size() + b_[l].size();
    return n;
  }
  double& parameter(std::size_t i) {
    for (std::size_t l = 0; l < w_.size(); ++l) {
      if (i < w_[l].size()) return w_[l][i];
      i -= w_[l].size();
      if (i < b_[l].size()) return b_[l][i];
      i -= b_[l].size();
    }
    throw DomainError("Mlp: parameter index out of range");
  }

  std::vector<double> predict(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != in_width())
      throw WidthMismatchError("Mlp: input width mismatch");
    std::vector<double> cur = x;
    for (std::size_t l = 0; l < w_.size(); ++l) {
      std::vector<double> next(widths_[l + 1]);
      affine(l, cur, next);
      if (l + 1 < w_.size()) apply_activation(next);
      cur = std::move(next);
    }
    return cur;
  }

  /// Forward pass keeping the per-layer activations needed for backward.
  struct Trace {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts.back() = output
    std::vector<std::vector<double>> pre;   // pre-activations per non-input layer
  };
  Trace forward(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != in_width())
      throw WidthMismatchError("Mlp: input width mismatch");
    Trace t;
    t.acts.push_back(x);
    for (std::size_t l = 0; l < w_.size(); ++l) {
      std::vector<double> z(widths_[l + 1]);
      affine(l, t.acts.back(), z);
      t.pre.push_back(z);
      if (l + 1 < w_.size()) apply_activation(z);
      t.acts.push_back(std::move(z));
    }
    return t;
  }

  struct Gradients {
    std::vector<std::vector<double>> w;  // same shapes as the weights
    std::vector<std::vector<double>> b;
    std::vector<double> input;  // dL/dx
    void zero_like(const Mlp& m) {
      w.clear();
      b.clear();
      for (std::size_t l = 0; l < m.w_.size(); ++l) {
        w.emplace_back(m.w_[l].size(), 0.0);
        b.emplace_back(m.b_[l].size(), 0.0);
      }
      input.assign(m.in_width(), 0.0);
    }
  };

  /// Accumulates dL/dparams and returns dL/dinput given dL/doutput.
  void backward(const Trace& t, const std::vector<double>& dout, Gradients& g) const {
    std::vector<double> delta = dout;  // dL/dz for the output layer (linear)
    for (std::size_t li = w_.size(); li-- > 0;) {
      const int in = widths_[li], out = widths_[li + 1];
      const auto& a_in = t.acts[li];
      for (int o = 0; o < out; ++o) {
        g.b[li][o] += delta[o];
        const std::size_t row = static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) g.w[li][row + i] += delta[o] * a_in[i];
      }
      std::vector<double> prev(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const std::size_t row = static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) prev[i] += w_[li][row + i] * delta[o];
      }
      if (li > 0) {
        // multiply by activation derivative of layer li's pre-activations
        const auto& z = t.pre[li - 1];
        for (int i = 0; i < in; ++i) prev[i] *= activation_derivative(z[i]);
      }
      delta = std::move(prev);
    }
    for (int i = 0; i < in_width(); ++i) g.input[i] += delta[i];
  }

  /// d(output[k])/d(input) rows for all outputs; used by gradient checks.
  std::vector<double> input_gradient(const std::vector<double>& x, int output_index) const {
    const Trace t = forward(x);
    std::vector<double> dout(out_width(), 0.0);
    dout[output_index] = 1.0;
    Gradients g;
    g.zero_like(*this);
    backward(t, dout, g);
    return g.input;
  }

  Json to_json() const {
    Json j;
    j["widths"] = widths_;
    j["activation"] = to_string(act_);
    j["seed"] = seed_;
    j["weights"] = w_;
    j["biases"] = b_;
    return j;
  }
  static Mlp from_json(const Json& j) {
    Mlp m;
    m.widths_ = j.at("widths").get<std::vector<int>>();
    m.act_ = activation_from_string(j.at("activation").get<std::string>());
    if (j.contains("seed")) m.seed_ = j.at("seed").get<std::uint64_t>();
    m.w_ = j.at("weights").get<std::vector<std::vector<double>>>();
    m.b_ = j.at("biases").get<std::vector<std::vector<double>>>();
    for (std::size_t l = 0; l + 1 < m.widths_.size(); ++l) {
      if (m.w_[l].size() != static_cast<std::size_t>(m.widths_[l]) * m.widths_[l + 1] ||
          m.b_[l].size() != static_cast<std::size_t>(m.widths_[l + 1]))
        throw DomainError("Mlp json: inconsistent layer shapes");
    }
    return m;
  }

  std::vector<std::vector<double>>& weights() { return w_; }
  std::vector<std::vector<double>>& biases() { return b_; }
  const std::vector<std::vector<double>>& weights() const { return w_; }
  const std::vector<std::vector<double>>& biases() const { return b_; }

 private:
  void affine(std::size_t l, const std::vector<double>& in, std::vector<double>& out) const {
    const int ni = widths_[l], no = widths_[l + 1];
    for (int o = 0; o < no; ++o) {
      const std::size_t row = static_cast<std::size_t>(o) * ni;
      double s = b_[l][o];
      for (int i = 0; i < ni; ++i) s += w_[l][row + i] * in[i];
      out[o] = s;
    }
  }
  void apply_activation(std::vector<double>& v) const {
    if (act_ == Activation::kTanh)
      for (auto& x : v) x = std::tanh(x);
    else
      for (auto& x : v) x = x > 0.0 ? x : 0.0;
  }
  double activation_derivative(double pre) const {
    if (act_ == Activation::kTanh) {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    return pre > 0.0 ? 1.0 : 0.0;
  }

  std::vector<int> widths_;
  std::vector<std::vector<double>> w_;
  std::vector<std::vector<double>> b_;
  Activation act_ = Activation::kTanh;
  std::uint64_t seed_ = 0;
};

/// Adam state over a flat parameter view (several tensors updated together).
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

  /// One step given the gradient; params and grad must be the flat views.
  /// lr_scale modulates the base learning rate (for schedules).
  void step(std::vector<double*>& params, const std::vector<double>& grad,
            double lr_scale = 1.0) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      *params[i] -= lr_scale * lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

struct TrainResult {
  std::vector<double> loss_history;
};

namespace detail {
/// Root-variance with a relative floor: a (near-)constant feature gets an
/// O(|mean|+1) scale instead of an ULP-sized one, so trainable parameters
/// feeding the feature can move without blowing up the standardized value.
inline double robust_scale(double var, double mean) {
  const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
  const double floor = 1e-8 * (1.0 + std::abs(mean));
  return sd > floor ? sd : std::max(1.0, std::abs(mean));
}
}  // namespace detail

/// Trains on mean-squared-error over (x, y) pairs. Deterministic given the
/// config seed. Throws NonFiniteError if the loss diverges.
inline Mlp train_mlp(const std::vector<std::vector<double>>& x,
                     const std::vector<std::vector<double>>& y, const TrainConfig& cfg,
                     TrainResult* result = nullptr) {
  cfg.validate();
  if (x.empty() || x.size() != y.size())
    throw DomainError("train_mlp: need nonempty, equal-length inputs and targets");
  const int in_w = static_cast<int>(x[0].size());
  const int out_w = static_cast<int>(y[0].size());
  for (const auto& r : x)
    if (static_cast<int>(r.size()) != in_w) throw WidthMismatchError("train_mlp: ragged inputs");
  for (const auto& r : y)
    if (static_cast<int>(r.size()) != out_w) throw WidthMismatchError("train_mlp: ragged targets");

  Mlp m = Mlp::init(in_w, out_w, cfg.hidden, activation_from_string(cfg.activation), cfg.seed);
  if (cfg.epochs == 0) return m;

  const std::size_t n = x.size();
  std::size_t batch = cfg.batch > 0 ? static_cast<std::size_t>(cfg.batch) : 4096;
  if (n <= batch) batch = n;  // full batch below the threshold

  const bool use_adam = cfg.optimizer == "adam";
  AdamOptimizer adam(m.parameter_count(), cfg.lr);
  std::vector<double*> params;
  for (std::size_t i = 0; i < m.parameter_count(); ++i) params.push_back(&m.parameter(i));
  std::vector<double> flat_grad(m.parameter_count(), 0.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::Engine shuffle_eng(rng::derive_seed(cfg.seed, {0x5u}));

  Mlp::Gradients g;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) {
      // deterministic Fisher-Yates
      for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = shuffle_eng.next_u64() % (i + 1);
        std::swap(order[i], order[j]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      g.zero_like(m);
      double loss = 0.0;
      for (std::size_t ii = start; ii < end; ++ii) {
        const auto& xi = x[order[ii]];
        const auto& yi = y[order[ii]];
        const auto trace = m.forward(xi);
        const auto& out = trace.acts.back();
        std::vector<double> dout(out_w);
        for (int k = 0; k < out_w; ++k) {
          const double diff = out[k] - yi[k];
          loss += diff * diff;
          dout[k] = 2.0 * diff / (static_cast<double>(end - start) * out_w);
        }
        m.backward(trace, dout, g);
      }
      loss /= static_cast<double>(end - start) * out_w;
      epoch_loss += loss * static_cast<double>(end - start);
      if (!std::isfinite(loss)) throw NonFiniteError("train_mlp: loss diverged");
      std::size_t k = 0;
      for (std::size_t l = 0; l < g.w.size(); ++l) {
        for (double wg : g.w[l]) flat_grad[k++] = wg;
        for (double bg : g.b[l]) flat_grad[k++] = bg;
      }
      if (use_adam) {
        adam.step(params, flat_grad, cfg.lr_scale(epoch));
      } else {
        const double lr = cfg.lr * cfg.lr_scale(epoch);
        for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= lr * flat_grad[i];
      }
    }
    if (result) result->loss_history.push_back(epoch_loss / static_cast<double>(n));
  }
  return m;
}

inline double mse(const Mlp& m, const std::vector<std::vector<double>>& x,
                  const std::vector<std::vector<double>>& y) {
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto out = m.predict(x[i]);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double d = out[k] - y[i][k];
      s += d * d;
      ++count;
    }
  }
  return count ? s / static_cast<double>(count) : 0.0;
}

}  // namespace pasym
