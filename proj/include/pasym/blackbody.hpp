#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/json_io.hpp"
#include "pasym/mlp.hpp"
#include "pasym/random.hpp"
#include "pasym/units_model.hpp"

namespace pasym {

/// SI defining constants. Only h's value appears in these dimensions'
/// original derivation; c and k are the 2019 SI exact values.
struct PhysConstants {
  Quantity c{2.99792458e8, units::m() / units::s()};
  Quantity k{1.380649e-23, units::energy() / units::K()};
  Quantity h{6.62607015e-34, units::kg() * units::m().pow(2) / units::s()};

  void validate() const {
    if (!(c.value > 0 && k.value > 0 && h.value > 0))
      throw DomainError("PhysConstants: values must be positive");
    if (!(c.dim == units::m() / units::s()) || !(k.dim == units::energy() / units::K()) ||
        !(h.dim == units::kg() * units::m().pow(2) / units::s()))
      throw DimensionError("PhysConstants: wrong dimensions");
  }

  PhysConstants rescaled(const UnitScaling& s) const {
    PhysConstants out = *this;
    out.c = rescale_quantity(c, s);
    out.k = rescale_quantity(k, s);
    out.h = rescale_quantity(h, s);
    return out;
  }
};

inline Dimension spectral_radiance_dim() {
  // energy / time / area / wavelength = kg m^-1 s^-3
  return units::kg() / units::m() / units::s().pow(3);
}

/// Planck's law: B_lambda = (2 h c^2 / lambda^5) / (exp(h c / (lambda k T)) - 1).
/// Inputs must carry length and temperature dimensions in the same convention
/// as the constants; the result has dimension kg m^-1 s^-3 in any convention.
inline Quantity planck_intensity(const Quantity& lambda, const Quantity& temperature,
                                 const PhysConstants& consts) {
  if (!(lambda.dim == units::m()))
    throw DimensionError("planck_intensity: lambda must have length dimension");
  if (!(temperature.dim == units::K()))
    throw DimensionError("planck_intensity: T must have temperature dimension");
  if (!(lambda.value > 0.0) || !(temperature.value > 0.0))
    throw DomainError("planck_intensity: lambda and T must be positive");
  const double a =
      consts.h.value * consts.c.value / (lambda.value * consts.k.value * temperature.value);
  const double prefactor =
      2.0 * consts.h.value * consts.c.value * consts.c.value / std::pow(lambda.value, 5);
  double value;
  if (a > 350.0) {
    const double e = std::exp(-a);
    value = prefactor * e / (1.0 - e);
  } else {
    value = prefactor / std::expm1(a);
  }
  Dimension out_dim = (consts.h.dim * consts.c.dim.pow(2) / lambda.dim.pow(5));
  return {value, out_dim};
}

struct BlackbodyConfig {
  std::array<double, 2> lambda_range{2e-7, 5e-5};  // m, sampled log-uniform
  std::array<double, 2> temperature_range{300.0, 8000.0};  // K, sampled uniform
  int samples = 5000;
  double noise = 0.05;  // relative, multiplicative Gaussian
  std::uint64_t seed = 7;
  double test_fraction = 0.2;  // validation fraction comes from TrainConfig
  int lattice_bound = 1;
  int search_epochs = 400;  // per-candidate training in the lattice search

  void validate() const {
    if (!(lambda_range[0] > 0 && lambda_range[1] > lambda_range[0]))
      throw DomainError("BlackbodyConfig: bad lambda range");
    if (!(temperature_range[0] > 0 && temperature_range[1] > temperature_range[0]))
      throw DomainError("BlackbodyConfig: bad temperature range");
    if (samples < 1) throw DomainError("BlackbodyConfig: samples >= 1");
    if (noise < 0) throw DomainError("BlackbodyConfig: noise >= 0");
    if (!(test_fraction >= 0 && test_fraction < 1))
      throw DomainError("BlackbodyConfig: test_fraction in [0,1)");
    if (lattice_bound < 1) throw DomainError("BlackbodyConfig: lattice_bound >= 1");
  }

  Json to_json() const {
    Json j;
    j["lambda_range"] = lambda_range;
    j["temperature_range"] = temperature_range;
    j["samples"] = samples;
    j["noise"] = noise;
    j["seed"] = seed;
    j["test_fraction"] = test_fraction;
    j["lattice_bound"] = lattice_bound;
    j["search_epochs"] = search_epochs;
    return j;
  }
  static BlackbodyConfig from_json(const Json& j) {
    BlackbodyConfig c;
    if (j.contains("lambda_range")) c.lambda_range = j.at("lambda_range").get<std::array<double, 2>>();
    if (j.contains("temperature_range"))
      c.temperature_range = j.at("temperature_range").get<std::array<double, 2>>();
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("noise")) c.noise = j.at("noise").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("test_fraction")) c.test_fraction = j.at("test_fraction").get<double>();
    if (j.contains("lattice_bound")) c.lattice_bound = j.at("lattice_bound").get<int>();
    if (j.contains("search_epochs")) c.search_epochs = j.at("search_epochs").get<int>();
    c.validate();
    return c;
  }
};

struct BlackbodyData {
  std::vector<double> lambda;     // m
  std::vector<double> temperature;  // K
  std::vector<double> intensity;  // kg m^-1 s^-3, noisy
};

/// Noisy Planck samples: lambda log-uniform, T uniform, multiplicative
/// Gaussian noise at the configured relative level. Deterministic per seed.
inline BlackbodyData generate_blackbody(const BlackbodyConfig& cfg, const PhysConstants& consts) {
  cfg.validate();
  consts.validate();
  BlackbodyData d;
  rng::Engine eng(rng::derive_seed(cfg.seed, {0xB1ACu}));
  const double llo = std::log(cfg.lambda_range[0]);
  const double lhi = std::log(cfg.lambda_range[1]);
  for (int i = 0; i < cfg.samples; ++i) {
    const double lambda = std::exp(eng.uniform(llo, lhi));
    const double t = eng.uniform(cfg.temperature_range[0], cfg.temperature_range[1]);
    const double b =
        planck_intensity({lambda, units::m()}, {t, units::K()}, consts).value;
    const double eps = cfg.noise * eng.normal();
    d.lambda.push_back(lambda);
    d.temperature.push_back(t);
    d.intensity.push_back(b * (1.0 + eps));
  }
  return d;
}

struct BlackbodyReport {
  BlackbodyConfig config;
  // test MSE in log intensity for the three models
  double mse_covariant_no_constant = 0.0;
  double mse_covariant_with_constant = 0.0;
  double mse_raw_mlp = 0.0;
  ConstantSearchResult search;
  UnitsCovariantModel model_no_constant;
  UnitsCovariantModel model_with_constant;
  Mlp raw_mlp;
  // raw MLP normalization of the log target (covariant models need none)
  double raw_out_center = 0.0, raw_out_scale = 1.0;
  std::vector<double> loss_no_constant, loss_with_constant, loss_raw;
};

namespace detail {

inline UnitsFitData blackbody_fit_data(const BlackbodyData& d,
                                       const std::vector<std::size_t>& idx,
                                       const PhysConstants& consts) {
  UnitsFitData f;
  f.names = {"lambda", "T", "c", "k"};
  f.dims = {units::m(), units::K(), consts.c.dim, consts.k.dim};
  f.values.assign(4, {});
  for (auto i : idx) {
    f.values[0].push_back(d.lambda[i]);
    f.values[1].push_back(d.temperature[i]);
    f.values[2].push_back(consts.c.value);
    f.values[3].push_back(consts.k.value);
    f.target.push_back(d.intensity[i]);
  }
  f.target_dim = spectral_radiance_dim();
  return f;
}

}  // namespace detail

/// The three-way experiment: (1) units-covariant regression on
/// {lambda, T, c, k}; (2) the same plus a searched dimensional constant;
/// (3) a plain MLP on raw (lambda, T). All three are scored by test MSE in
/// log intensity so the comparison is scale fair across many decades.
inline BlackbodyReport run_blackbody_experiment(const BlackbodyConfig& cfg,
                                                const TrainConfig& train_cfg,
                                                const PhysConstants& consts = {}) {
  cfg.validate();
  train_cfg.validate();
  const BlackbodyData data = generate_blackbody(cfg, consts);
  const std::size_t n = data.lambda.size();

  // train+val vs test split, deterministic per seed
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::Engine eng(rng::derive_seed(cfg.seed, {0x7e57u}));
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = eng.next_u64() % (i + 1);
    std::swap(order[i], order[j]);
  }
  const std::size_t n_test = static_cast<std::size_t>(std::floor(cfg.test_fraction * n));
  const std::vector<std::size_t> fit_idx(order.begin(), order.end() - n_test);
  const std::vector<std::size_t> test_idx(order.end() - n_test, order.end());

  const UnitsFitData fit_data = detail::blackbody_fit_data(data, fit_idx, consts);
  const UnitsFitData test_data = detail::blackbody_fit_data(data, test_idx, consts);

  BlackbodyReport rep;
  rep.config = cfg;

  auto log_mse_units = [&](const UnitsCovariantModel& m) {
    double s = 0.0;
    const std::size_t nt = test_data.n_samples();
    for (std::size_t i = 0; i < nt; ++i) {
      std::vector<double> x{test_data.values[0][i], test_data.values[1][i],
                            test_data.values[2][i], test_data.values[3][i]};
      const double d = std::log(m.predict(x)) - std::log(test_data.target[i]);
      s += d * d;
    }
    return s / static_cast<double>(nt);
  };

  // (1) no extra constant: structurally alpha * c k T / lambda^4
  {
    UnitsFitInfo info;
    rep.model_no_constant = fit_units_covariant(fit_data, std::nullopt, train_cfg, &info);
    rep.loss_no_constant = info.loss_history;
    rep.mse_covariant_no_constant = log_mse_units(rep.model_no_constant);
  }

  // (2) lattice search, then refit the winner at full epochs
  {
    TrainConfig search_cfg = train_cfg;
    search_cfg.epochs = cfg.search_epochs;
    rep.search = search_dimensional_constant(fit_data, cfg.lattice_bound, search_cfg);
    TrainConfig final_cfg = train_cfg;
    final_cfg.seed = rng::derive_seed(
        train_cfg.seed,
        {static_cast<std::uint64_t>(rep.search.selected[0] + 16),
         static_cast<std::uint64_t>(rep.search.selected[1] + 16),
         static_cast<std::uint64_t>(rep.search.selected[2] + 16),
         static_cast<std::uint64_t>(rep.search.selected[3] + 16)});
    UnitsFitInfo info;
    rep.model_with_constant =
        fit_units_covariant(fit_data, rep.search.dim, final_cfg, &info);
    rep.loss_with_constant = info.loss_history;
    rep.mse_covariant_with_constant = log_mse_units(rep.model_with_constant);
    // report the refit magnitude as the selected constant's magnitude
    rep.search.magnitude = rep.model_with_constant.constant_magnitude();
  }

  // (3) plain MLP on raw (lambda, T); the target is standardized log B, the
  // inputs are deliberately left in raw units (the point of the baseline).
  {
    std::vector<std::vector<double>> x, y;
    for (std::size_t i = 0; i < fit_data.n_samples(); ++i)
      x.push_back({fit_data.values[0][i], fit_data.values[1][i]});
    std::vector<double> logt;
    for (double t : fit_data.target) logt.push_back(std::log(t));
    double mean = 0.0, var = 0.0;
    for (double v : logt) mean += v;
    mean /= static_cast<double>(logt.size());
    for (double v : logt) var += (v - mean) * (v - mean);
    var /= static_cast<double>(logt.size());
    rep.raw_out_center = mean;
    rep.raw_out_scale = var > 0 ? std::sqrt(var) : 1.0;
    for (double v : logt) y.push_back({(v - mean) / rep.raw_out_scale});
    TrainResult tr;
    TrainConfig mlp_cfg = train_cfg;
    mlp_cfg.seed = rng::derive_seed(train_cfg.seed, {0x3a3u});
    rep.raw_mlp = train_mlp(x, y, mlp_cfg, &tr);
    rep.loss_raw = tr.loss_history;
    double s = 0.0;
    for (std::size_t i = 0; i < test_data.n_samples(); ++i) {
      const double pred =
          rep.raw_mlp.predict({test_data.values[0][i], test_data.values[1][i]})[0] *
              rep.raw_out_scale +
          rep.raw_out_center;
      const double d = pred - std::log(test_data.target[i]);
      s += d * d;
    }
    rep.mse_raw_mlp = s / static_cast<double>(test_data.n_samples());
  }

  return rep;
}

inline Json blackbody_report_json(const BlackbodyReport& rep) {
  Json j;
  j["version"] = 1;
  j["config"] = rep.config.to_json();
  j["models"] = Json::object();
  j["models"]["covariant_no_constant"] = Json::object();
  j["models"]["covariant_no_constant"]["test_log_mse"] = rep.mse_covariant_no_constant;
  j["models"]["covariant_with_constant"] = Json::object();
  j["models"]["covariant_with_constant"]["test_log_mse"] = rep.mse_covariant_with_constant;
  j["models"]["covariant_with_constant"]["constant_dim"] = rep.search.dim.to_json();
  j["models"]["covariant_with_constant"]["constant_magnitude"] = rep.search.magnitude;
  j["models"]["raw_mlp"] = Json::object();
  j["models"]["raw_mlp"]["test_log_mse"] = rep.mse_raw_mlp;
  j["search"] = Json::object();
  j["search"]["baseline_feasible"] = rep.search.baseline_feasible;
  j["search"]["baseline_val_mse"] = rep.search.baseline_val_mse;
  j["search"]["no_constant_needed"] = rep.search.no_constant_needed;
  j["search"]["selected_exponents"] = rep.search.selected;
  j["search"]["table"] = Json::array();
  for (const auto& c : rep.search.table) {
    Json e;
    e["exponents"] = c.exponents;
    e["feasible"] = c.feasible;
    e["val_mse"] = c.val_mse;
    e["magnitude"] = c.magnitude;
    j["search"]["table"].push_back(e);
  }
  j["model_no_constant"] = rep.model_no_constant.to_json();
  j["model_with_constant"] = rep.model_with_constant.to_json();
  j["raw_mlp"] = Json::object();
  j["raw_mlp"]["mlp"] = rep.raw_mlp.to_json();
  j["raw_mlp"]["out_center"] = rep.raw_out_center;
  j["raw_mlp"]["out_scale"] = rep.raw_out_scale;
  return j;
}

}  // namespace pasym
