#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pasym/diagnostics.hpp"
#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/geometry.hpp"
#include "pasym/linalg.hpp"
#include "pasym/schema.hpp"

namespace pasym {

/// Covariant normalizer. Scalar features pool (mean, root-variance) per units
/// class; each vector feature gets an equivariant mean shift and one common
/// scale from sqrt(mean (1/3)(v-mu).(v-mu)); each tensor feature gets a mean
/// tensor shift and a mean spectral-norm scale. Outputs are dimensionless.
struct Normalizer {
  struct ScalarClass {
    Dimension dim;
    std::vector<std::string> members;
    double shift = 0.0;
    double scale = 1.0;
  };
  struct VectorNorm {
    std::string name;
    Dimension dim;
    Arr3 shift{0.0, 0.0, 0.0};
    double scale = 1.0;  // one scale for all three components, by construction
  };
  struct TensorNorm {
    std::string name;
    Dimension dim;
    Mat3 shift{};
    double scale = 1.0;
  };

  std::vector<ScalarClass> classes;
  std::vector<VectorNorm> vectors;
  std::vector<TensorNorm> tensors;
  std::optional<std::array<double, kNumBaseUnits>> unit_scales;
  double unit_scale_residual = 0.0;
  std::vector<Diagnostic> warnings;

  const ScalarClass& class_for(const Dimension& d) const {
    for (const auto& c : classes)
      if (c.dim == d) return c;
    throw SchemaMismatchError("normalizer: no units class for dimension " + d.to_string());
  }
  const VectorNorm& vector_for(const std::string& name) const {
    for (const auto& v : vectors)
      if (v.name == name) return v;
    throw SchemaMismatchError("normalizer: no vector feature '" + name + "'");
  }
  const TensorNorm& tensor_for(const std::string& name) const {
    for (const auto& t : tensors)
      if (t.name == name) return t;
    throw SchemaMismatchError("normalizer: no tensor feature '" + name + "'");
  }

  Json to_json() const {
    Json j;
    j["version"] = 1;
    j["scalar_classes"] = Json::array();
    for (const auto& c : classes) {
      Json e;
      e["dim"] = c.dim.to_json();
      e["members"] = c.members;
      e["shift"] = c.shift;
      e["scale"] = c.scale;
      j["scalar_classes"].push_back(e);
    }
    j["vectors"] = Json::array();
    for (const auto& v : vectors) {
      Json e;
      e["name"] = v.name;
      e["dim"] = v.dim.to_json();
      e["shift"] = v.shift;
      e["scale"] = v.scale;
      j["vectors"].push_back(e);
    }
    j["tensors"] = Json::array();
    for (const auto& t : tensors) {
      Json e;
      e["name"] = t.name;
      e["dim"] = t.dim.to_json();
      Json rows = Json::array();
      for (int i = 0; i < 3; ++i) rows.push_back(t.shift[i]);
      e["shift"] = rows;
      e["scale"] = t.scale;
      j["tensors"].push_back(e);
    }
    if (unit_scales) {
      j["unit_scales"] = Json::object();
      for (int i = 0; i < kNumBaseUnits; ++i) j["unit_scales"][kBaseUnitNames[i]] = (*unit_scales)[i];
      j["unit_scale_residual"] = unit_scale_residual;
    }
    j["warnings"] = Json::array();
    for (const auto& w : warnings) j["warnings"].push_back(w.to_json());
    return j;
  }

  static Normalizer from_json(const Json& j) {
    Normalizer n;
    for (const auto& e : j.at("scalar_classes")) {
      ScalarClass c;
      c.dim = Dimension::from_json(e.at("dim"));
      c.members = e.at("members").get<std::vector<std::string>>();
      c.shift = e.at("shift").get<double>();
      c.scale = e.at("scale").get<double>();
      n.classes.push_back(std::move(c));
    }
    for (const auto& e : j.at("vectors")) {
      VectorNorm v;
      v.name = e.at("name").get<std::string>();
      v.dim = Dimension::from_json(e.at("dim"));
      v.shift = e.at("shift").get<Arr3>();
      v.scale = e.at("scale").get<double>();
      n.vectors.push_back(std::move(v));
    }
    for (const auto& e : j.at("tensors")) {
      TensorNorm t;
      t.name = e.at("name").get<std::string>();
      t.dim = Dimension::from_json(e.at("dim"));
      const auto rows = e.at("shift");
      for (int i = 0; i < 3; ++i) t.shift[i] = rows[i].get<Arr3>();
      t.scale = e.at("scale").get<double>();
      n.tensors.push_back(std::move(t));
    }
    if (j.contains("unit_scales")) {
      std::array<double, kNumBaseUnits> s{};
      for (int i = 0; i < kNumBaseUnits; ++i) s[i] = j.at("unit_scales").at(kBaseUnitNames[i]).get<double>();
      n.unit_scales = s;
      if (j.contains("unit_scale_residual"))
        n.unit_scale_residual = j.at("unit_scale_residual").get<double>();
    }
    return n;
  }
};

/// Base-unit scales making per-feature spreads as close to 1 as possible:
/// least squares on log sigma_j = sum_u a_ju log S_u, minimum-norm on rank
/// deficiency. residual is the RMS log deviation from unit spread.
struct ScaleFit {
  std::array<double, kNumBaseUnits> scales{1.0, 1.0, 1.0, 1.0};
  double residual = 0.0;
};

namespace detail {

struct FeatureSpread {
  std::string name;
  Dimension dim;
  double spread = 0.0;
};

/// Raw per-feature spreads: root-variance for scalars, the vector rms scale,
/// the mean spectral deviation for tensors. Used by fit_base_unit_scales.
inline std::vector<FeatureSpread> feature_spreads(const Dataset& data,
                                                  const FeatureSchema& schema) {
  std::vector<FeatureSpread> out;
  const auto idx = schema_column_indices(schema, data);
  const std::size_t n = data.n_rows();
  if (n == 0) throw EmptyClassError("feature_spreads: dataset has no samples");
  std::size_t k = 0;
  for (const auto& f : schema.features()) {
    FeatureSpread fs{f.name, f.dim, 0.0};
    if (f.kind == FeatureKind::kScalar) {
      double mean = 0.0, var = 0.0;
      for (const auto& r : data.rows) mean += r[idx[k]];
      mean /= static_cast<double>(n);
      for (const auto& r : data.rows) var += (r[idx[k]] - mean) * (r[idx[k]] - mean);
      fs.spread = std::sqrt(var / static_cast<double>(n));
      k += 1;
    } else if (f.kind == FeatureKind::kVector3) {
      Arr3 mean{0, 0, 0};
      for (const auto& r : data.rows)
        for (int i = 0; i < 3; ++i) mean[i] += r[idx[k + i]];
      for (int i = 0; i < 3; ++i) mean[i] /= static_cast<double>(n);
      double acc = 0.0;
      for (const auto& r : data.rows) {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
          const double d = r[idx[k + i]] - mean[i];
          d2 += d * d;
        }
        acc += d2 / 3.0;
      }
      fs.spread = std::sqrt(acc / static_cast<double>(n));
      k += 3;
    } else {
      Mat3 mean{};
      for (const auto& r : data.rows)
        for (int i = 0; i < 9; ++i) mean[i / 3][i % 3] += r[idx[k + i]];
      for (int i = 0; i < 9; ++i) mean[i / 3][i % 3] /= static_cast<double>(n);
      double acc = 0.0;
      for (const auto& r : data.rows) {
        Mat3 dev{};
        for (int i = 0; i < 9; ++i) dev[i / 3][i % 3] = r[idx[k + i]] - mean[i / 3][i % 3];
        acc += spectral_norm(Tensor3{dev, f.dim}).value;
      }
      fs.spread = acc / static_cast<double>(n);
      k += 9;
    }
    out.push_back(std::move(fs));
  }
  return out;
}

}  // namespace detail

inline ScaleFit fit_base_unit_scales(const Dataset& data, const FeatureSchema& schema) {
  const auto spreads = detail::feature_spreads(data, schema);
  linalg::Matrix a;
  std::vector<double> b;
  for (const auto& fs : spreads) {
    if (!(fs.spread > 0.0)) continue;  // constant features carry no scale information
    std::vector<double> row(kNumBaseUnits);
    for (int u = 0; u < kNumBaseUnits; ++u) row[u] = fs.dim[u].value();
    a.push_back(std::move(row));
    b.push_back(std::log(fs.spread));
  }
  ScaleFit fit;
  if (a.empty()) return fit;
  const auto x = linalg::min_norm_least_squares(a, b);
  double ss = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    double pred = 0.0;
    for (int u = 0; u < kNumBaseUnits; ++u) pred += a[r][u] * x[u];
    ss += (b[r] - pred) * (b[r] - pred);
  }
  fit.residual = std::sqrt(ss / static_cast<double>(a.size()));
  for (int u = 0; u < kNumBaseUnits; ++u) fit.scales[u] = std::exp(x[u]);
  return fit;
}

/// Fits the covariant normalizer; optionally also fits base-unit scales and
/// stores them on the result. Zero-spread statistics resolve to scale = 1
/// with a W1 warning so constant features pass through shifted to zero.
inline Normalizer fit_normalizer(const Dataset& data, const FeatureSchema& schema,
                                 bool with_unit_scales = false) {
  data.check_rectangular();
  const auto idx = schema_column_indices(schema, data);
  const std::size_t n = data.n_rows();
  if (n == 0) throw EmptyClassError("fit_normalizer: dataset has no samples");

  Normalizer norm;
  auto warn_degenerate = [&](const std::string& what) {
    norm.warnings.push_back(Diagnostic{
        "W1", Severity::kWarning,
        "degenerate scale (zero spread) for " + what + "; using scale 1", {what}});
  };

  // scalar classes pooled by exact Dimension, in first-seen order
  std::size_t k = 0;
  std::vector<std::pair<Dimension, std::vector<std::pair<std::string, int>>>> groups;
  for (const auto& f : schema.features()) {
    if (f.kind == FeatureKind::kScalar) {
      bool found = false;
      for (auto& g : groups)
        if (g.first == f.dim) {
          g.second.emplace_back(f.name, idx[k]);
          found = true;
        }
      if (!found) groups.push_back({f.dim, {{f.name, idx[k]}}});
    }
    k += f.column_count();
  }
  for (const auto& g : groups) {
    Normalizer::ScalarClass cls;
    cls.dim = g.first;
    double mean = 0.0, var = 0.0;
    const double count = static_cast<double>(g.second.size() * n);
    for (const auto& [name, col] : g.second) {
      cls.members.push_back(name);
      for (const auto& r : data.rows) mean += r[col];
    }
    mean /= count;
    for (const auto& [name, col] : g.second)
      for (const auto& r : data.rows) var += (r[col] - mean) * (r[col] - mean);
    var /= count;
    cls.shift = mean;
    if (var > 0.0) {
      cls.scale = std::sqrt(var);
    } else {
      cls.scale = 1.0;
      warn_degenerate("units class " + cls.dim.to_string());
    }
    norm.classes.push_back(std::move(cls));
  }

  // vectors and tensors per feature
  k = 0;
  for (const auto& f : schema.features()) {
    if (f.kind == FeatureKind::kVector3) {
      Normalizer::VectorNorm v;
      v.name = f.name;
      v.dim = f.dim;
      for (const auto& r : data.rows)
        for (int i = 0; i < 3; ++i) v.shift[i] += r[idx[k + i]];
      for (int i = 0; i < 3; ++i) v.shift[i] /= static_cast<double>(n);
      double acc = 0.0;
      for (const auto& r : data.rows) {
        double d2 = 0.0;
        for (int i = 0; i < 3; ++i) {
          const double d = r[idx[k + i]] - v.shift[i];
          d2 += d * d;
        }
        acc += d2 / 3.0;
      }
      acc /= static_cast<double>(n);
      if (acc > 0.0) {
        v.scale = std::sqrt(acc);
      } else {
        v.scale = 1.0;
        warn_degenerate("vector feature " + f.name);
      }
      norm.vectors.push_back(std::move(v));
    } else if (f.kind == FeatureKind::kTensor3) {
      Normalizer::TensorNorm t;
      t.name = f.name;
      t.dim = f.dim;
      for (const auto& r : data.rows)
        for (int i = 0; i < 9; ++i) t.shift[i / 3][i % 3] += r[idx[k + i]];
      for (int i = 0; i < 9; ++i) t.shift[i / 3][i % 3] /= static_cast<double>(n);
      double acc = 0.0;
      for (const auto& r : data.rows) {
        Mat3 dev{};
        for (int i = 0; i < 9; ++i) dev[i / 3][i % 3] = r[idx[k + i]] - t.shift[i / 3][i % 3];
        acc += spectral_norm(Tensor3{dev, f.dim}).value;
      }
      acc /= static_cast<double>(n);
      if (acc > 0.0) {
        t.scale = acc;
      } else {
        t.scale = 1.0;
        warn_degenerate("tensor feature " + f.name);
      }
      norm.tensors.push_back(std::move(t));
    }
    k += f.column_count();
  }

  if (with_unit_scales) {
    const auto fit = fit_base_unit_scales(data, schema);
    norm.unit_scales = fit.scales;
    norm.unit_scale_residual = fit.residual;
  }
  return norm;
}

/// Applies the fitted shifts and scales; the output is dimensionless. The
/// three components of any vector (nine of any tensor) are scaled by one
/// common factor, never independently.
inline Dataset apply_normalizer(const Normalizer& norm, const Dataset& data,
                                const FeatureSchema& schema) {
  data.check_rectangular();
  const auto idx = schema_column_indices(schema, data);
  Dataset out;
  out.columns = schema.columns();
  out.rows.assign(data.n_rows(), {});
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    auto& row = out.rows[r];
    row.reserve(out.columns.size());
    std::size_t k = 0;
    for (const auto& f : schema.features()) {
      if (f.kind == FeatureKind::kScalar) {
        const auto& cls = norm.class_for(f.dim);
        row.push_back((data.rows[r][idx[k]] - cls.shift) / cls.scale);
      } else if (f.kind == FeatureKind::kVector3) {
        const auto& v = norm.vector_for(f.name);
        if (!(v.dim == f.dim))
          throw SchemaMismatchError("apply_normalizer: dimension mismatch for " + f.name);
        for (int i = 0; i < 3; ++i)
          row.push_back((data.rows[r][idx[k + i]] - v.shift[i]) / v.scale);
      } else {
        const auto& t = norm.tensor_for(f.name);
        if (!(t.dim == f.dim))
          throw SchemaMismatchError("apply_normalizer: dimension mismatch for " + f.name);
        for (int i = 0; i < 9; ++i)
          row.push_back((data.rows[r][idx[k + i]] - t.shift[i / 3][i % 3]) / t.scale);
      }
      k += f.column_count();
    }
  }
  return out;
}

}  // namespace pasym
