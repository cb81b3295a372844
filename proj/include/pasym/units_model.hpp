#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/exponent_solver.hpp"
#include "pasym/mlp.hpp"
#include "pasym/random.hpp"

namespace pasym {

/// Regression data for units-covariant fitting: one positive value column per
/// named input feature plus a positive target column. Quantities here are
/// positive scaling objects; the model works in log space throughout.
struct UnitsFitData {
  std::vector<std::string> names;
  std::vector<Dimension> dims;
  std::vector<std::vector<double>> values;  // values[feature][sample]
  std::vector<double> target;
  Dimension target_dim;

  std::size_t n_samples() const { return target.size(); }

  void validate() const {
    if (names.size() != dims.size() || names.size() != values.size())
      throw DomainError("UnitsFitData: inconsistent feature lists");
    if (names.empty()) throw DomainError("UnitsFitData: no input features");
    for (const auto& col : values) {
      if (col.size() != target.size()) throw DomainError("UnitsFitData: ragged columns");
      for (double v : col)
        if (!(v > 0.0) || !std::isfinite(v))
          throw DomainError("UnitsFitData: inputs must be positive and finite");
    }
    for (double v : target)
      if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError("UnitsFitData: targets must be positive and finite");
  }
};

/// Prediction = (prod_i x_i^scaffold_i) * f(Pi features). The scaffold carries
/// the target Dimension exactly; f sees only dimensionless power products, so
/// the model is units covariant by construction. An optional extra constant
/// (Dimension + learned log magnitude) participates as one more input.
class UnitsCovariantModel {
 public:
  std::vector<std::string> input_names;     // without the constant
  std::vector<Dimension> input_dims;        // without the constant
  Dimension target_dim;
  std::vector<Rational> scaffold;           // per input (+ constant last, if any)
  std::vector<std::vector<Rational>> basis;  // Pi exponents, same layout
  bool has_constant = false;
  Dimension constant_dim;
  double log_magnitude = 0.0;

  bool use_mlp = false;   // false: single dimensionless prefactor alpha
  double log_alpha = 0.0;
  Mlp mlp;
  std::vector<double> in_center, in_scale;  // standardization of log-Pi features
  double out_center = 0.0, out_scale = 1.0;

  std::size_t n_terms() const { return input_dims.size() + (has_constant ? 1 : 0); }
  double constant_magnitude() const { return std::exp(log_magnitude); }

  /// log of the scaffold power product at the given per-input log-values.
  double scaffold_log(const std::vector<double>& log_values) const {
    double s = 0.0;
    for (std::size_t i = 0; i < log_values.size(); ++i)
      if (!scaffold[i].is_zero()) s += scaffold[i].value() * log_values[i];
    if (has_constant && !scaffold.back().is_zero())
      s += scaffold.back().value() * log_magnitude;
    return s;
  }

  std::vector<double> pi_log(const std::vector<double>& log_values) const {
    std::vector<double> out(basis.size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < log_values.size(); ++i)
        if (!basis[j][i].is_zero()) s += basis[j][i].value() * log_values[i];
      if (has_constant && !basis[j].back().is_zero())
        s += basis[j].back().value() * log_magnitude;
      out[j] = s;
    }
    return out;
  }

  /// Predicted target value for one sample of the original (positive) inputs.
  double predict(const std::vector<double>& inputs) const {
    if (inputs.size() != input_dims.size())
      throw WidthMismatchError("UnitsCovariantModel: wrong input count");
    std::vector<double> logs(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!(inputs[i] > 0.0))
        throw DomainError("UnitsCovariantModel: inputs must be positive");
      logs[i] = std::log(inputs[i]);
    }
    double resid;
    if (!use_mlp) {
      resid = log_alpha;
    } else {
      std::vector<double> x = pi_log(logs);
      for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - in_center[j]) / in_scale[j];
      resid = mlp.predict(x)[0] * out_scale + out_center;
    }
    return std::exp(scaffold_log(logs) + resid);
  }

  /// The same model re-expressed in a different unit convention: only the
  /// constant's stored magnitude changes representation.
  UnitsCovariantModel rescaled(const UnitScaling& s) const {
    UnitsCovariantModel m = *this;
    if (has_constant) m.log_magnitude += s.log_factor(constant_dim);
    return m;
  }

  Json to_json() const {
    Json j;
    j["input_names"] = input_names;
    j["input_dims"] = Json::array();
    for (const auto& d : input_dims) j["input_dims"].push_back(d.to_json());
    j["target_dim"] = target_dim.to_json();
    auto rationals = [](const std::vector<Rational>& v) {
      Json a = Json::array();
      for (const auto& r : v) a.push_back(r.to_string());
      return a;
    };
    j["scaffold"] = rationals(scaffold);
    j["pi_basis"] = Json::array();
    for (const auto& b : basis) j["pi_basis"].push_back(rationals(b));
    if (has_constant) {
      j["constant"] = Json::object();
      j["constant"]["dim"] = constant_dim.to_json();
      j["constant"]["log_magnitude"] = log_magnitude;
    }
    j["inner"] = use_mlp ? "mlp" : "alpha";
    if (use_mlp) {
      j["mlp"] = mlp.to_json();
      j["in_center"] = in_center;
      j["in_scale"] = in_scale;
      j["out_center"] = out_center;
      j["out_scale"] = out_scale;
    } else {
      j["log_alpha"] = log_alpha;
    }
    return j;
  }

  static UnitsCovariantModel from_json(const Json& j) {
    UnitsCovariantModel m;
    m.input_names = j.at("input_names").get<std::vector<std::string>>();
    for (const auto& d : j.at("input_dims")) m.input_dims.push_back(Dimension::from_json(d));
    m.target_dim = Dimension::from_json(j.at("target_dim"));
    auto rationals = [](const Json& a) {
      std::vector<Rational> v;
      for (const auto& r : a) v.push_back(Rational::parse(r.get<std::string>()));
      return v;
    };
    m.scaffold = rationals(j.at("scaffold"));
    for (const auto& b : j.at("pi_basis")) m.basis.push_back(rationals(b));
    if (j.contains("constant")) {
      m.has_constant = true;
      m.constant_dim = Dimension::from_json(j.at("constant").at("dim"));
      m.log_magnitude = j.at("constant").at("log_magnitude").get<double>();
    }
    m.use_mlp = j.at("inner").get<std::string>() == "mlp";
    if (m.use_mlp) {
      m.mlp = Mlp::from_json(j.at("mlp"));
      m.in_center = j.at("in_center").get<std::vector<double>>();
      m.in_scale = j.at("in_scale").get<std::vector<double>>();
      m.out_center = j.at("out_center").get<double>();
      m.out_scale = j.at("out_scale").get<double>();
    } else {
      m.log_alpha = j.at("log_alpha").get<double>();
    }
    return m;
  }
};

struct UnitsFitInfo {
  std::vector<double> loss_history;  // standardized training MSE per epoch
  double train_mse = 0.0;            // log-target MSE on the train split
  double val_mse = 0.0;              // log-target MSE on the validation split
};

namespace detail {

struct SplitIndices {
  std::vector<std::size_t> train, val;
};

inline SplitIndices split_train_val(std::size_t n, double val_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng::Engine eng(rng::derive_seed(seed, {0x51u}));
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = eng.next_u64() % (i + 1);
    std::swap(order[i], order[j]);
  }
  const std::size_t n_val = static_cast<std::size_t>(std::floor(val_fraction * n));
  SplitIndices s;
  s.train.assign(order.begin(), order.end() - n_val);
  s.val.assign(order.end() - n_val, order.end());
  if (s.train.empty()) throw DomainError("split: empty training set");
  return s;
}

}  // namespace detail

/// Fits a units-covariant regression. The scaffold and Pi basis come from the
/// exact solver; the inner function (single prefactor when the Pi basis is
/// empty, otherwise an MLP over log-Pi features) and the optional constant's
/// log magnitude are trained jointly by Adam. Throws InfeasibleError when the
/// target dimension is not spanned — the signal that a dimensional constant
/// is missing.
inline UnitsCovariantModel fit_units_covariant(const UnitsFitData& data,
                                               std::optional<Dimension> extra_constant,
                                               const TrainConfig& cfg,
                                               UnitsFitInfo* info = nullptr) {
  data.validate();
  cfg.validate();
  const std::size_t n = data.n_samples();
  const std::size_t n_inputs = data.values.size();

  UnitsCovariantModel m;
  m.input_names = data.names;
  m.input_dims = data.dims;
  m.target_dim = data.target_dim;
  m.has_constant = extra_constant.has_value();
  if (m.has_constant) m.constant_dim = *extra_constant;

  std::vector<Dimension> all_dims = data.dims;
  if (m.has_constant) all_dims.push_back(m.constant_dim);
  const auto sol = solve_target(all_dims, data.target_dim);  // may throw InfeasibleError
  m.scaffold = sol.particular;
  m.basis.clear();
  for (const auto& b : sol.nullspace) m.basis.push_back(primitive_integer_form(b));

  // Per-sample log values of the data inputs (the constant's log value is the
  // trained parameter, added separately).
  std::vector<std::vector<double>> logs(n_inputs, std::vector<double>(n));
  for (std::size_t i = 0; i < n_inputs; ++i)
    for (std::size_t k = 0; k < n; ++k) logs[i][k] = std::log(data.values[i][k]);
  std::vector<double> log_target(n);
  for (std::size_t k = 0; k < n; ++k) log_target[k] = std::log(data.target[k]);

  const auto split = detail::split_train_val(n, cfg.val_fraction, cfg.seed);

  // Static parts: Pi features and residual targets without the constant term.
  const std::size_t n_pi = m.basis.size();
  std::vector<std::vector<double>> pi_static(n_pi, std::vector<double>(n, 0.0));
  std::vector<double> pi_const_coeff(n_pi, 0.0);
  for (std::size_t j = 0; j < n_pi; ++j) {
    for (std::size_t i = 0; i < n_inputs; ++i)
      if (!m.basis[j][i].is_zero())
        for (std::size_t k = 0; k < n; ++k) pi_static[j][k] += m.basis[j][i].value() * logs[i][k];
    if (m.has_constant) pi_const_coeff[j] = m.basis[j].back().value();
  }
  std::vector<double> resid_static(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_inputs; ++i)
      if (!m.scaffold[i].is_zero()) s += m.scaffold[i].value() * logs[i][k];
    resid_static[k] = log_target[k] - s;
  }
  const double scaffold_const_coeff = m.has_constant ? m.scaffold.back().value() : 0.0;

  // Constant magnitude initialization: center the first Pi feature that
  // involves the constant at zero over the training split. Without this the
  // log magnitude would have to travel arbitrarily far under Adam.
  m.log_magnitude = 0.0;
  if (m.has_constant) {
    for (std::size_t j = 0; j < n_pi; ++j) {
      if (pi_const_coeff[j] == 0.0) continue;
      double mean = 0.0;
      for (auto k : split.train) mean += pi_static[j][k];
      mean /= static_cast<double>(split.train.size());
      m.log_magnitude = -mean / pi_const_coeff[j];
      break;
    }
  }

  auto pi_value = [&](std::size_t j, std::size_t k) {
    return pi_static[j][k] + pi_const_coeff[j] * m.log_magnitude;
  };
  auto resid_value = [&](std::size_t k) {
    return resid_static[k] - scaffold_const_coeff * m.log_magnitude;
  };

  if (n_pi == 0) {
    // Single dimensionless prefactor; init at the closed-form optimum, then
    // fine-tune jointly with the constant magnitude (a no-op when absent).
    m.use_mlp = false;
    double mean = 0.0;
    for (auto k : split.train) mean += resid_value(k);
    m.log_alpha = mean / static_cast<double>(split.train.size());
    const std::size_t n_params = 1 + (m.has_constant ? 1 : 0);
    AdamOptimizer adam(n_params, cfg.lr);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      double g_alpha = 0.0, g_logm = 0.0, loss = 0.0;
      for (auto k : split.train) {
        const double diff = m.log_alpha - resid_value(k);
        loss += diff * diff;
        g_alpha += 2.0 * diff;
        if (m.has_constant) g_logm += 2.0 * diff * scaffold_const_coeff;
      }
      const double inv = 1.0 / static_cast<double>(split.train.size());
      loss *= inv;
      if (!std::isfinite(loss)) throw NonFiniteError("fit_units_covariant: loss diverged");
      if (info) info->loss_history.push_back(loss);
      std::vector<double*> params{&m.log_alpha};
      std::vector<double> grad{g_alpha * inv};
      if (m.has_constant) {
        params.push_back(&m.log_magnitude);
        grad.push_back(g_logm * inv);
      }
      adam.step(params, grad, cfg.lr_scale(epoch));
    }
  } else {
    m.use_mlp = true;
    // Standardize log-Pi inputs and residual targets on the train split;
    // dimensionless shifts/scales keep the model units covariant.
    m.in_center.assign(n_pi, 0.0);
    m.in_scale.assign(n_pi, 1.0);
    for (std::size_t j = 0; j < n_pi; ++j) {
      double mean = 0.0, var = 0.0;
      for (auto k : split.train) mean += pi_value(j, k);
      mean /= static_cast<double>(split.train.size());
      for (auto k : split.train) {
        const double d = pi_value(j, k) - mean;
        var += d * d;
      }
      var /= static_cast<double>(split.train.size());
      m.in_center[j] = mean;
      m.in_scale[j] = detail::robust_scale(var, mean);
    }
    {
      double mean = 0.0, var = 0.0;
      for (auto k : split.train) mean += resid_value(k);
      mean /= static_cast<double>(split.train.size());
      for (auto k : split.train) {
        const double d = resid_value(k) - mean;
        var += d * d;
      }
      var /= static_cast<double>(split.train.size());
      m.out_center = mean;
      m.out_scale = detail::robust_scale(var, mean);
    }

    m.mlp = Mlp::init(static_cast<int>(n_pi), 1, cfg.hidden,
                      activation_from_string(cfg.activation), cfg.seed);
    const std::size_t n_mlp = m.mlp.parameter_count();
    const std::size_t n_params = n_mlp + (m.has_constant ? 1 : 0);
    std::vector<double*> params;
    for (std::size_t i = 0; i < n_mlp; ++i) params.push_back(&m.mlp.parameter(i));
    if (m.has_constant) params.push_back(&m.log_magnitude);
    std::vector<double> grad(n_params, 0.0);
    AdamOptimizer adam(n_params, cfg.lr);
    Mlp::Gradients g;
    std::vector<double> x(n_pi);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      g.zero_like(m.mlp);
      double g_logm = 0.0, loss = 0.0;
      const double inv = 1.0 / static_cast<double>(split.train.size());
      for (auto k : split.train) {
        for (std::size_t j = 0; j < n_pi; ++j)
          x[j] = (pi_value(j, k) - m.in_center[j]) / m.in_scale[j];
        const auto trace = m.mlp.forward(x);
        const double target_std = (resid_value(k) - m.out_center) / m.out_scale;
        const double diff = trace.acts.back()[0] - target_std;
        loss += diff * diff;
        const std::vector<double> dout{2.0 * diff * inv};
        std::fill(g.input.begin(), g.input.end(), 0.0);
        m.mlp.backward(trace, dout, g);
        if (m.has_constant) {
          for (std::size_t j = 0; j < n_pi; ++j)
            g_logm += g.input[j] * pi_const_coeff[j] / m.in_scale[j];
          // the residual target moves with the constant through the scaffold
          g_logm += 2.0 * diff * inv * scaffold_const_coeff / m.out_scale;
        }
      }
      loss *= inv;
      if (!std::isfinite(loss)) throw NonFiniteError("fit_units_covariant: loss diverged");
      if (info) info->loss_history.push_back(loss);
      std::size_t p = 0;
      for (std::size_t l = 0; l < g.w.size(); ++l) {
        for (double wg : g.w[l]) grad[p++] = wg;
        for (double bg : g.b[l]) grad[p++] = bg;
      }
      if (m.has_constant) grad[p++] = g_logm;
      adam.step(params, grad, cfg.lr_scale(epoch));
    }
  }

  if (info) {
    auto eval = [&](const std::vector<std::size_t>& idx) {
      if (idx.empty()) return 0.0;
      double s = 0.0;
      for (auto k : idx) {
        double pred;
        if (!m.use_mlp) {
          pred = m.log_alpha;
        } else {
          std::vector<double> xs(n_pi);
          for (std::size_t j = 0; j < n_pi; ++j)
            xs[j] = (pi_value(j, k) - m.in_center[j]) / m.in_scale[j];
          pred = m.mlp.predict(xs)[0] * m.out_scale + m.out_center;
        }
        const double d = pred - resid_value(k);
        s += d * d;
      }
      return s / static_cast<double>(idx.size());
    };
    info->train_mse = eval(split.train);
    info->val_mse = split.val.empty() ? info->train_mse : eval(split.val);
  }
  return m;
}

/// One row of the exhaustive lattice search.
struct ConstantCandidate {
  std::array<int, kNumBaseUnits> exponents{};
  bool feasible = false;
  double val_mse = std::numeric_limits<double>::infinity();
  double magnitude = 0.0;
};

struct ConstantSearchResult {
  Dimension dim;           // selected constant's dimension
  double magnitude = 0.0;  // selected constant's fitted magnitude
  std::array<int, kNumBaseUnits> selected{};
  std::vector<ConstantCandidate> table;  // all candidates, lexicographic order
  bool baseline_feasible = false;
  double baseline_val_mse = std::numeric_limits<double>::infinity();
  bool no_constant_needed = false;
};

/// Exhaustive search over constants with exponents in {-b..b}^4 minus the
/// all-zero tuple. Each candidate's log magnitude is trained jointly with the
/// inner MLP; the tuple with the lowest validation MSE wins. Per-candidate
/// seeds derive deterministically from (cfg.seed, exponent tuple), so the
/// score table is reproducible.
inline ConstantSearchResult search_dimensional_constant(const UnitsFitData& data,
                                                        int lattice_bound,
                                                        const TrainConfig& cfg) {
  if (lattice_bound < 1) throw DomainError("search_dimensional_constant: lattice_bound >= 1");
  ConstantSearchResult res;

  {
    TrainConfig base_cfg = cfg;
    try {
      UnitsFitInfo info;
      (void)fit_units_covariant(data, std::nullopt, base_cfg, &info);
      res.baseline_feasible = true;
      res.baseline_val_mse = info.val_mse;
    } catch (const InfeasibleError&) {
      res.baseline_feasible = false;
    }
  }

  const int b = lattice_bound;
  std::size_t best = static_cast<std::size_t>(-1);
  for (int e0 = -b; e0 <= b; ++e0)
    for (int e1 = -b; e1 <= b; ++e1)
      for (int e2 = -b; e2 <= b; ++e2)
        for (int e3 = -b; e3 <= b; ++e3) {
          if (e0 == 0 && e1 == 0 && e2 == 0 && e3 == 0) continue;
          ConstantCandidate cand;
          cand.exponents = {e0, e1, e2, e3};
          Dimension cdim(std::array<Rational, kNumBaseUnits>{Rational(e0), Rational(e1),
                                                             Rational(e2), Rational(e3)});
          TrainConfig ccfg = cfg;
          ccfg.seed = rng::derive_seed(
              cfg.seed, {static_cast<std::uint64_t>(e0 + 16), static_cast<std::uint64_t>(e1 + 16),
                         static_cast<std::uint64_t>(e2 + 16), static_cast<std::uint64_t>(e3 + 16)});
          try {
            UnitsFitInfo info;
            const auto model = fit_units_covariant(data, cdim, ccfg, &info);
            cand.feasible = true;
            cand.val_mse = info.val_mse;
            cand.magnitude = model.constant_magnitude();
          } catch (const InfeasibleError&) {
            cand.feasible = false;
          }
          res.table.push_back(cand);
          if (cand.feasible &&
              (best == static_cast<std::size_t>(-1) || cand.val_mse < res.table[best].val_mse))
            best = res.table.size() - 1;
        }

  if (best != static_cast<std::size_t>(-1)) {
    const auto& w = res.table[best];
    res.selected = w.exponents;
    res.dim = Dimension(std::array<Rational, kNumBaseUnits>{
        Rational(w.exponents[0]), Rational(w.exponents[1]), Rational(w.exponents[2]),
        Rational(w.exponents[3])});
    res.magnitude = w.magnitude;
    // "No constant needed": the best candidate does not beat the feasible
    // baseline by more than a factor-2 noise margin.
    res.no_constant_needed =
        res.baseline_feasible && w.val_mse > 0.5 * res.baseline_val_mse;
  } else {
    res.no_constant_needed = res.baseline_feasible;
  }
  return res;
}

}  // namespace pasym
