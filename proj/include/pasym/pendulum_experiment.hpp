#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pasym/dynamics_model.hpp"
#include "pasym/json_io.hpp"
#include "pasym/pendulum.hpp"

namespace pasym {

struct PendulumExperimentConfig {
  int n_train = 500;
  int train_labels = 5;  // T for training samples
  int n_test = 64;
  int test_labels = 150;  // T for the test protocol, t0 = 0
  double label_spacing = 0.1;  // s
  double dt = 1e-3;            // s, integrator step
  double init_radius = 0.5;
  std::uint64_t seed = 3;
  int equivariance_trials = 32;
  PendulumParams params;

  void validate() const {
    if (n_train < 1 || n_test < 1) throw DomainError("pendulum config: sample counts >= 1");
    if (train_labels < 1 || test_labels < 1) throw DomainError("pendulum config: labels >= 1");
    if (!(label_spacing > 0 && dt > 0)) throw DomainError("pendulum config: positive times");
    params.validate();
  }

  Json to_json() const {
    Json j;
    j["n_train"] = n_train;
    j["train_labels"] = train_labels;
    j["n_test"] = n_test;
    j["test_labels"] = test_labels;
    j["label_spacing"] = label_spacing;
    j["dt"] = dt;
    j["init_radius"] = init_radius;
    j["seed"] = seed;
    j["equivariance_trials"] = equivariance_trials;
    j["params"] = Json::object();
    j["params"]["m1"] = params.m1;
    j["params"]["m2"] = params.m2;
    j["params"]["k1"] = params.k1;
    j["params"]["k2"] = params.k2;
    j["params"]["l1"] = params.l1;
    j["params"]["l2"] = params.l2;
    j["params"]["q0"] = params.q0;
    j["params"]["g"] = params.g;
    return j;
  }
  static PendulumExperimentConfig from_json(const Json& j) {
    PendulumExperimentConfig c;
    if (j.contains("n_train")) c.n_train = j.at("n_train").get<int>();
    if (j.contains("train_labels")) c.train_labels = j.at("train_labels").get<int>();
    if (j.contains("n_test")) c.n_test = j.at("n_test").get<int>();
    if (j.contains("test_labels")) c.test_labels = j.at("test_labels").get<int>();
    if (j.contains("label_spacing")) c.label_spacing = j.at("label_spacing").get<double>();
    if (j.contains("dt")) c.dt = j.at("dt").get<double>();
    if (j.contains("init_radius")) c.init_radius = j.at("init_radius").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("equivariance_trials"))
      c.equivariance_trials = j.at("equivariance_trials").get<int>();
    if (j.contains("params")) {
      const auto& p = j.at("params");
      if (p.contains("m1")) c.params.m1 = p.at("m1").get<double>();
      if (p.contains("m2")) c.params.m2 = p.at("m2").get<double>();
      if (p.contains("k1")) c.params.k1 = p.at("k1").get<double>();
      if (p.contains("k2")) c.params.k2 = p.at("k2").get<double>();
      if (p.contains("l1")) c.params.l1 = p.at("l1").get<double>();
      if (p.contains("l2")) c.params.l2 = p.at("l2").get<double>();
      if (p.contains("q0")) c.params.q0 = p.at("q0").get<Arr3>();
      if (p.contains("g")) c.params.g = p.at("g").get<Arr3>();
    }
    c.validate();
    return c;
  }
};

/// Training defaults for the pendulum experiment. The learned gravity vector
/// aligns slowly, so this experiment trains longer than the library default.
inline TrainConfig pendulum_train_defaults() {
  TrainConfig cfg;
  cfg.epochs = 4000;
  return cfg;
}

struct PendulumModelResult {
  DynamicsModel model;
  std::vector<double> relerr_curve;  // mean State.RelErr per label time
  double mean_relerr = 0.0;
  double equivariance_deviation = 0.0;
  std::vector<double> loss_history;
};

struct PendulumReport {
  PendulumExperimentConfig config;
  std::vector<double> times;  // test label times
  PendulumModelResult known_g, no_g, learned_g;
  double learned_g_angle_rad = 0.0;  // angle between learned u and true g
};

/// Trains Known-g / No-g / Learned-g on the training protocol and evaluates
/// State.RelErr over the long test horizon; also runs the O(3) equivariance
/// check on all three trained models and measures the learned vector's angle
/// to the true gravity.
inline PendulumReport run_pendulum_experiment(const PendulumExperimentConfig& cfg,
                                              const TrainConfig& train_cfg) {
  cfg.validate();
  train_cfg.validate();

  const PendulumDataset trainset =
      generate_dataset(cfg.n_train, cfg.train_labels, rng::derive_seed(cfg.seed, {0x7217u}),
                       cfg.params, cfg.label_spacing, cfg.dt, cfg.init_radius);
  const PendulumDataset testset =
      generate_dataset(cfg.n_test, cfg.test_labels, rng::derive_seed(cfg.seed, {0x7e57u}),
                       cfg.params, cfg.label_spacing, cfg.dt, cfg.init_radius);

  PendulumReport rep;
  rep.config = cfg;
  rep.times = testset.samples.front().label_times;

  std::vector<PendulumState> probes;
  for (int i = 0; i < 4 && i < cfg.n_test; ++i) probes.push_back(testset.samples[i].z0);

  auto run_mode = [&](DynamicsMode mode) {
    PendulumModelResult res;
    DynamicsFitInfo info;
    TrainConfig mode_cfg = train_cfg;
    mode_cfg.seed = rng::derive_seed(train_cfg.seed, {static_cast<std::uint64_t>(mode)});
    res.model = fit_dynamics(trainset, mode, mode_cfg, &info);
    res.loss_history = info.loss_history;
    res.relerr_curve.assign(cfg.test_labels, 0.0);
    for (const auto& sample : testset.samples) {
      const auto preds = predict_dynamics(res.model, sample.z0, sample.label_times);
      for (int t = 0; t < cfg.test_labels; ++t)
        res.relerr_curve[t] += state_rel_err(preds[t], sample.label_states[t]);
    }
    double total = 0.0;
    for (auto& v : res.relerr_curve) {
      v /= static_cast<double>(cfg.n_test);
      total += v;
    }
    res.mean_relerr = total / static_cast<double>(cfg.test_labels);
    res.equivariance_deviation = dynamics_equivariance_deviation(
        res.model, probes, cfg.label_spacing, cfg.equivariance_trials,
        rng::derive_seed(cfg.seed, {0xe9u, static_cast<std::uint64_t>(mode)}));
    return res;
  };

  rep.known_g = run_mode(DynamicsMode::kKnownG);
  rep.no_g = run_mode(DynamicsMode::kNoG);
  rep.learned_g = run_mode(DynamicsMode::kLearnedG);

  const Arr3& u = rep.learned_g.model.u;
  const Arr3& g = cfg.params.g;
  const double cosang =
      vec::dot(u, g) / (vec::norm(u) * vec::norm(g));
  rep.learned_g_angle_rad = std::acos(std::min(1.0, std::max(-1.0, cosang)));
  return rep;
}

inline Json pendulum_report_json(const PendulumReport& rep) {
  Json j;
  j["version"] = 1;
  j["config"] = rep.config.to_json();
  j["times"] = rep.times;
  auto model_json = [](const PendulumModelResult& r) {
    Json e;
    e["mean_state_relerr"] = r.mean_relerr;
    e["state_relerr_curve"] = r.relerr_curve;
    e["equivariance_deviation"] = r.equivariance_deviation;
    e["model"] = r.model.to_json();
    return e;
  };
  j["models"] = Json::object();
  j["models"]["known_g"] = model_json(rep.known_g);
  j["models"]["no_g"] = model_json(rep.no_g);
  j["models"]["learned_g"] = model_json(rep.learned_g);
  j["learned_g_angle_rad"] = rep.learned_g_angle_rad;
  return j;
}

}  // namespace pasym
