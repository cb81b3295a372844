#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pasym/errors.hpp"
#include "pasym/geometry.hpp"
#include "pasym/json_io.hpp"
#include "pasym/mlp.hpp"
#include "pasym/pendulum.hpp"
#include "pasym/random.hpp"

namespace pasym {

enum class DynamicsMode { kKnownG, kNoG, kLearnedG };

inline const char* to_string(DynamicsMode m) {
  switch (m) {
    case DynamicsMode::kKnownG: return "known_g";
    case DynamicsMode::kNoG: return "no_g";
    case DynamicsMode::kLearnedG: return "learned_g";
  }
  return "?";
}
inline DynamicsMode dynamics_mode_from_string(const std::string& s) {
  if (s == "known_g") return DynamicsMode::kKnownG;
  if (s == "no_g") return DynamicsMode::kNoG;
  if (s == "learned_g") return DynamicsMode::kLearnedG;
  throw DomainError("unknown dynamics mode '" + s + "'");
}

/// O(3)-equivariant one-shot dynamics predictor. The basis vectors are
/// V = [q1-q0, q2-q0, p1, p2] plus g (Known-g) or a learned vector u
/// (Learned-g). The trunk MLP sees only the upper triangle of the Gram matrix
/// of V plus the invariant scalar dt, and emits one coefficient per
/// (output vector, basis vector) pair; each predicted vector is the
/// coefficient-weighted sum of the basis, so rotating every input (and the
/// hidden vector) rotates every output.
class DynamicsModel {
 public:
  DynamicsMode mode = DynamicsMode::kNoG;
  Mlp trunk;
  Arr3 q0{0.0, 0.0, 0.0};
  Arr3 g{0.0, 0.0, -1.0};  // used by Known-g only
  Arr3 u{0.0, 0.0, 0.0};   // trained by Learned-g only
  std::vector<double> in_center, in_scale;  // invariant-input standardization

  int n_basis() const { return mode == DynamicsMode::kNoG ? 4 : 5; }
  int n_invariants() const { return n_basis() * (n_basis() + 1) / 2 + 1; }  // + dt
  int n_outputs() const { return 4 * n_basis(); }

  std::array<Arr3, 5> basis(const PendulumState& z) const {
    std::array<Arr3, 5> v{};
    v[0] = vec::sub(z.q1, q0);
    v[1] = vec::sub(z.q2, q0);
    v[2] = z.p1;
    v[3] = z.p2;
    if (mode == DynamicsMode::kKnownG) v[4] = g;
    if (mode == DynamicsMode::kLearnedG) v[4] = u;
    return v;
  }

  /// Raw (unstandardized) invariant inputs: Gram upper triangle then dt.
  std::vector<double> invariants(const PendulumState& z, double dt) const {
    const auto v = basis(z);
    const int nb = n_basis();
    std::vector<double> x;
    x.reserve(n_invariants());
    for (int i = 0; i < nb; ++i)
      for (int j = i; j < nb; ++j) x.push_back(vec::dot(v[i], v[j]));
    x.push_back(dt);
    return x;
  }

  PendulumState predict(const PendulumState& z, double dt) const {
    std::vector<double> x = invariants(z, dt);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - in_center[i]) / in_scale[i];
    const std::vector<double> c = trunk.predict(x);
    const auto v = basis(z);
    const int nb = n_basis();
    auto combine = [&](int slot) {
      Arr3 out{0.0, 0.0, 0.0};
      for (int j = 0; j < nb; ++j) {
        const double cj = c[slot * nb + j];
        for (int i = 0; i < 3; ++i) out[i] += cj * v[j][i];
      }
      return out;
    };
    PendulumState out;
    out.q1 = vec::add(q0, combine(0));
    out.q2 = vec::add(q0, combine(1));
    out.p1 = combine(2);
    out.p2 = combine(3);
    return out;
  }

  /// The model with its context vectors expressed in rotated coordinates.
  /// Rotating q0, g and u alongside the state is what the passive O(3)
  /// symmetry demands of a complete description.
  DynamicsModel rotated(const Orthogonal3& r) const {
    DynamicsModel m = *this;
    m.q0 = r.apply(q0);
    m.g = r.apply(g);
    m.u = r.apply(u);
    return m;
  }

  Json to_json() const {
    Json j;
    j["mode"] = to_string(mode);
    j["q0"] = q0;
    j["g"] = g;
    j["u"] = u;
    j["trunk"] = trunk.to_json();
    j["in_center"] = in_center;
    j["in_scale"] = in_scale;
    return j;
  }
  static DynamicsModel from_json(const Json& j) {
    DynamicsModel m;
    m.mode = dynamics_mode_from_string(j.at("mode").get<std::string>());
    m.q0 = j.at("q0").get<Arr3>();
    m.g = j.at("g").get<Arr3>();
    m.u = j.at("u").get<Arr3>();
    m.trunk = Mlp::from_json(j.at("trunk"));
    m.in_center = j.at("in_center").get<std::vector<double>>();
    m.in_scale = j.at("in_scale").get<std::vector<double>>();
    return m;
  }
};

struct DynamicsFitInfo {
  std::vector<double> loss_history;
};

namespace detail {

struct FlatSample {
  PendulumState z0;
  double dt;
  PendulumState label;
};

inline std::vector<FlatSample> flatten(const PendulumDataset& ds) {
  std::vector<FlatSample> out;
  for (const auto& s : ds.samples)
    for (std::size_t t = 0; t < s.label_times.size(); ++t)
      out.push_back({s.z0, s.label_times[t], s.label_states[t]});
  return out;
}

}  // namespace detail

/// Trains a dynamics model on (z0, dt) -> z(dt) pairs from the dataset. The
/// loss is the mean squared Euclidean error over all four output vectors and
/// all label times, which is O(3)-invariant by construction. In Learned-g
/// mode the hidden vector u receives the same Adam updates as the weights.
inline DynamicsModel fit_dynamics(const PendulumDataset& trainset, DynamicsMode mode,
                                  const TrainConfig& cfg, DynamicsFitInfo* info = nullptr) {
  cfg.validate();
  const auto samples = detail::flatten(trainset);
  if (samples.empty()) throw DomainError("fit_dynamics: empty training set");

  DynamicsModel m;
  m.mode = mode;
  m.q0 = trainset.params.q0;
  m.g = trainset.params.g;
  if (mode == DynamicsMode::kLearnedG) {
    rng::Engine eng(rng::derive_seed(cfg.seed, {0x11u}));
    for (int i = 0; i < 3; ++i) m.u[i] = eng.normal();
  }

  const int nb = m.n_basis();
  const int n_in = m.n_invariants();
  const int n_out = m.n_outputs();
  m.trunk = Mlp::init(n_in, n_out, cfg.hidden, activation_from_string(cfg.activation),
                      rng::derive_seed(cfg.seed, {0xd1u}));

  // Fixed affine standardization of the invariant inputs, computed once at
  // init (with the initial u in Learned-g mode). Applying a fixed affine map
  // to invariants cannot break equivariance.
  m.in_center.assign(n_in, 0.0);
  m.in_scale.assign(n_in, 1.0);
  {
    std::vector<double> mean(n_in, 0.0), var(n_in, 0.0);
    for (const auto& s : samples) {
      const auto x = m.invariants(s.z0, s.dt);
      for (int i = 0; i < n_in; ++i) mean[i] += x[i];
    }
    for (int i = 0; i < n_in; ++i) mean[i] /= static_cast<double>(samples.size());
    for (const auto& s : samples) {
      const auto x = m.invariants(s.z0, s.dt);
      for (int i = 0; i < n_in; ++i) var[i] += (x[i] - mean[i]) * (x[i] - mean[i]);
    }
    for (int i = 0; i < n_in; ++i) {
      var[i] /= static_cast<double>(samples.size());
      m.in_center[i] = mean[i];
      m.in_scale[i] = detail::robust_scale(var[i], mean[i]);
    }
  }

  const bool train_u = mode == DynamicsMode::kLearnedG;
  const std::size_t n_mlp = m.trunk.parameter_count();
  const std::size_t n_params = n_mlp + (train_u ? 3 : 0);
  std::vector<double*> params;
  for (std::size_t i = 0; i < n_mlp; ++i) params.push_back(&m.trunk.parameter(i));
  if (train_u)
    for (int i = 0; i < 3; ++i) params.push_back(&m.u[i]);
  std::vector<double> grad(n_params, 0.0);
  AdamOptimizer adam(n_params, cfg.lr);

  // pair (i,j), i<=j, for each gram input slot
  std::vector<std::pair<int, int>> gram_index;
  for (int i = 0; i < nb; ++i)
    for (int j = i; j < nb; ++j) gram_index.emplace_back(i, j);

  Mlp::Gradients g;
  const double inv = 1.0 / (static_cast<double>(samples.size()) * 12.0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    g.zero_like(m.trunk);
    Arr3 gu{0.0, 0.0, 0.0};
    double loss = 0.0;
    for (const auto& s : samples) {
      const auto v = m.basis(s.z0);
      std::vector<double> x = m.invariants(s.z0, s.dt);
      for (int i = 0; i < n_in; ++i) x[i] = (x[i] - m.in_center[i]) / m.in_scale[i];
      const auto trace = m.trunk.forward(x);
      const auto& c = trace.acts.back();

      // predictions and output-side gradients
      std::array<Arr3, 4> pred{};
      std::array<Arr3, 4> dpred{};
      const std::array<const Arr3*, 4> labels{&s.label.q1, &s.label.q2, &s.label.p1,
                                              &s.label.p2};
      for (int o = 0; o < 4; ++o) {
        Arr3 acc{0.0, 0.0, 0.0};
        for (int j = 0; j < nb; ++j)
          for (int i = 0; i < 3; ++i) acc[i] += c[o * nb + j] * v[j][i];
        if (o < 2) acc = vec::add(m.q0, acc);
        pred[o] = acc;
        for (int i = 0; i < 3; ++i) {
          const double diff = acc[i] - (*labels[o])[i];
          loss += diff * diff;
          dpred[o][i] = 2.0 * diff * inv;
        }
      }

      // coefficient gradients -> trunk backward
      std::vector<double> dout(n_out);
      for (int o = 0; o < 4; ++o)
        for (int j = 0; j < nb; ++j) dout[o * nb + j] = vec::dot(dpred[o], v[j]);
      std::fill(g.input.begin(), g.input.end(), 0.0);
      m.trunk.backward(trace, dout, g);

      if (train_u) {
        // u's gradient has two paths: as a basis vector in the outputs, and
        // through the Gram invariants.
        Arr3 dv{0.0, 0.0, 0.0};
        for (int o = 0; o < 4; ++o) {
          const double cj = c[o * nb + (nb - 1)];
          for (int i = 0; i < 3; ++i) dv[i] += cj * dpred[o][i];
        }
        for (int slot = 0; slot < n_in - 1; ++slot) {
          const auto [i, j] = gram_index[slot];
          if (i != nb - 1 && j != nb - 1) continue;
          const double dg = g.input[slot] / m.in_scale[slot];
          if (i == nb - 1 && j == nb - 1) {
            for (int k = 0; k < 3; ++k) dv[k] += dg * 2.0 * m.u[k];
          } else {
            const int other = i == nb - 1 ? j : i;
            for (int k = 0; k < 3; ++k) dv[k] += dg * v[other][k];
          }
        }
        for (int k = 0; k < 3; ++k) gu[k] += dv[k];
      }
    }
    loss *= inv;
    if (!std::isfinite(loss)) throw NonFiniteError("fit_dynamics: loss diverged");
    if (info) info->loss_history.push_back(loss);
    std::size_t p = 0;
    for (std::size_t l = 0; l < g.w.size(); ++l) {
      for (double wg : g.w[l]) grad[p++] = wg;
      for (double bg : g.b[l]) grad[p++] = bg;
    }
    if (train_u)
      for (int k = 0; k < 3; ++k) grad[p++] = gu[k];
    adam.step(params, grad, cfg.lr_scale(epoch));
  }
  return m;
}

/// One independent prediction per requested dt; no rollout chaining.
inline std::vector<PendulumState> predict_dynamics(const DynamicsModel& m,
                                                   const PendulumState& z0,
                                                   const std::vector<double>& times) {
  if (times.empty()) throw DomainError("predict_dynamics: times must be nonempty");
  std::vector<PendulumState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(m.predict(z0, t));
  return out;
}

/// Max relative deviation between predict(R z) and R predict(z) over seeded
/// O(3) elements; the hidden vectors rotate with the model.
inline double dynamics_equivariance_deviation(const DynamicsModel& m,
                                              const std::vector<PendulumState>& probes,
                                              double dt, int trials, std::uint64_t seed) {
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto r = haar_orthogonal(rng::derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    const auto rotated_model = m.rotated(r);
    for (const auto& z : probes) {
      const PendulumState lhs = rotated_model.predict(rotate_state(z, r), dt);
      const PendulumState rhs = rotate_state(m.predict(z, dt), r);
      const auto a = lhs.flat(), b = rhs.flat();
      double diff = 0.0, na = 0.0, nb = 0.0;
      for (int i = 0; i < 12; ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        na += a[i] * a[i];
        nb += b[i] * b[i];
      }
      const double dev = std::sqrt(diff) / (std::sqrt(na) + std::sqrt(nb) + 1e-30);
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

}  // namespace pasym
