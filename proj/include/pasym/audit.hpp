#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pasym/diagnostics.hpp"
#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/geometry.hpp"
#include "pasym/json_io.hpp"
#include "pasym/mlp.hpp"
#include "pasym/random.hpp"
#include "pasym/schema.hpp"
#include "pasym/units_model.hpp"

namespace pasym {

// ---------------------------------------------------------------------------
// Pipeline descriptions and the lint rule catalog
// ---------------------------------------------------------------------------

/// One step of a declarative pipeline description.
struct PipelineOp {
  enum class Kind { kPca, kKernel, kNorm, kNonlinearity, kNormalize, kLoss };

  Kind kind = Kind::kPca;
  std::vector<std::string> columns;  // column or feature names (features expand)
  std::string variant;               // kernel: rbf|poly|product; norm: l1|l2|linf;
                                     // normalize: free-form variant tag
  std::string name;                  // nonlinearity name
  std::optional<bool> homogeneous;   // nonlinearity; inferred from name if absent
  bool per_component = false;        // normalize
  std::vector<std::pair<std::string, Dimension>> loss_terms;
};

struct PipelineDesc {
  std::vector<PipelineOp> ops;

  static PipelineDesc from_json(const Json& j) {
    PipelineDesc p;
    for (const auto& e : j.at("ops")) {
      PipelineOp op;
      const auto kind = e.at("op").get<std::string>();
      if (kind == "pca")
        op.kind = PipelineOp::Kind::kPca;
      else if (kind == "kernel")
        op.kind = PipelineOp::Kind::kKernel;
      else if (kind == "norm")
        op.kind = PipelineOp::Kind::kNorm;
      else if (kind == "nonlinearity")
        op.kind = PipelineOp::Kind::kNonlinearity;
      else if (kind == "normalize")
        op.kind = PipelineOp::Kind::kNormalize;
      else if (kind == "loss")
        op.kind = PipelineOp::Kind::kLoss;
      else
        throw SchemaMismatchError("pipeline json: unknown op '" + kind + "'");
      if (e.contains("columns")) op.columns = e.at("columns").get<std::vector<std::string>>();
      if (e.contains("features")) {
        const auto extra = e.at("features").get<std::vector<std::string>>();
        op.columns.insert(op.columns.end(), extra.begin(), extra.end());
      }
      if (e.contains("kind")) op.variant = e.at("kind").get<std::string>();
      if (e.contains("variant")) op.variant = e.at("variant").get<std::string>();
      if (e.contains("name")) op.name = e.at("name").get<std::string>();
      if (e.contains("homogeneous")) op.homogeneous = e.at("homogeneous").get<bool>();
      if (e.contains("per_component")) op.per_component = e.at("per_component").get<bool>();
      if (e.contains("terms"))
        for (const auto& t : e.at("terms"))
          op.loss_terms.emplace_back(t.at("name").get<std::string>(),
                                     t.contains("dim") ? Dimension::from_json(t.at("dim"))
                                                       : Dimension{});
      p.ops.push_back(std::move(op));
    }
    return p;
  }
};

namespace detail {

struct ResolvedColumn {
  std::string column;
  Dimension dim;
  bool geometric_component;  // vector or tensor component
  FeatureKind feature_kind;
  std::string feature;
};

/// Expands column-or-feature references against the schema.
inline std::vector<ResolvedColumn> resolve_columns(const FeatureSchema& schema,
                                                   const std::vector<std::string>& refs) {
  std::vector<ResolvedColumn> out;
  for (const auto& ref : refs) {
    if (schema.has_feature(ref)) {
      const auto& f = schema.feature(ref);
      if (f.kind == FeatureKind::kScalar) {
        out.push_back({ref, f.dim, false, f.kind, f.name});
      } else if (f.kind == FeatureKind::kVector3) {
        for (const auto* sfx : kVectorSuffixes)
          out.push_back({ref + sfx, f.dim, true, f.kind, f.name});
      } else {
        for (const auto* sfx : kTensorSuffixes)
          out.push_back({ref + sfx, f.dim, true, f.kind, f.name});
      }
      continue;
    }
    const auto info = schema.column_info(ref);  // throws SchemaMismatchError if unknown
    out.push_back({ref, info.feature->dim, info.geometric_component, info.feature->kind,
                   info.feature->name});
  }
  return out;
}

inline bool mixed_dims(const std::vector<ResolvedColumn>& cols) {
  for (std::size_t i = 1; i < cols.size(); ++i)
    if (!(cols[i].dim == cols[0].dim)) return true;
  return false;
}

inline std::vector<std::string> column_names(const std::vector<ResolvedColumn>& cols,
                                             bool geometric_only = false) {
  std::vector<std::string> names;
  for (const auto& c : cols)
    if (!geometric_only || c.geometric_component) names.push_back(c.column);
  return names;
}

inline bool nonlinearity_is_homogeneous(const PipelineOp& op) {
  if (op.homogeneous) return *op.homogeneous;
  static const std::set<std::string> kHomogeneous{"relu", "leaky_relu", "abs", "identity",
                                                  "monomial"};
  return kHomogeneous.count(op.name) > 0;
}

}  // namespace detail

/// Static lint of a pipeline description against the rule catalog:
///   R1 PCA over columns with mixed units
///   R2 rbf/poly kernel over columns with mixed units (product kernels pass)
///   R3 nonlinearity applied to vector or tensor components
///   R4 non-homogeneous nonlinearity applied to a dimensional scalar
///   R5 L1/Linf norm over mixed units or geometric components
///   R6 per-component scaling of vector/tensor features in normalization
///   R7 loss terms with different units summed together
/// Diagnostics are ordered by pipeline position, then rule id.
inline std::vector<Diagnostic> lint_pipeline(const FeatureSchema& schema,
                                             const PipelineDesc& pipe) {
  std::vector<Diagnostic> out;
  for (std::size_t pos = 0; pos < pipe.ops.size(); ++pos) {
    const auto& op = pipe.ops[pos];
    const std::string at = "op " + std::to_string(pos + 1);
    switch (op.kind) {
      case PipelineOp::Kind::kPca: {
        const auto cols = detail::resolve_columns(schema, op.columns);
        if (detail::mixed_dims(cols))
          out.push_back({"R1", Severity::kError,
                         at + ": PCA over columns with mixed units is sensitive to the "
                              "units system; restrict it to same-unit columns",
                         detail::column_names(cols)});
        break;
      }
      case PipelineOp::Kind::kKernel: {
        if (op.variant == "product") break;  // per-unit factor kernels
        if (op.variant != "rbf" && op.variant != "poly")
          throw SchemaMismatchError("pipeline: unknown kernel kind '" + op.variant + "'");
        const auto cols = detail::resolve_columns(schema, op.columns);
        if (detail::mixed_dims(cols))
          out.push_back({"R2", Severity::kError,
                         at + ": " + op.variant +
                             " kernel sums and exponentiates inputs with mixed units; "
                             "dimensional quantities cannot be exponentiated",
                         detail::column_names(cols)});
        break;
      }
      case PipelineOp::Kind::kNorm: {
        if (op.variant == "l2") break;
        if (op.variant != "l1" && op.variant != "linf")
          throw SchemaMismatchError("pipeline: unknown norm kind '" + op.variant + "'");
        const auto cols = detail::resolve_columns(schema, op.columns);
        const bool mixed = detail::mixed_dims(cols);
        bool geometric = false;
        for (const auto& c : cols) geometric = geometric || c.geometric_component;
        if (mixed || geometric)
          out.push_back({"R5", Severity::kError,
                         at + ": " + op.variant +
                             " norm over mixed units or geometric components is not "
                             "covariant; only same-unit pure scalars qualify",
                         mixed ? detail::column_names(cols)
                               : detail::column_names(cols, true)});
        break;
      }
      case PipelineOp::Kind::kNonlinearity: {
        const auto cols = detail::resolve_columns(schema, op.columns);
        std::vector<std::string> geom = detail::column_names(cols, true);
        if (!geom.empty())
          out.push_back({"R3", Severity::kError,
                         at + ": nonlinearity '" + op.name +
                             "' applied to vector/tensor components; nonlinear functions "
                             "can only be applied to scalars",
                         geom});
        if (!detail::nonlinearity_is_homogeneous(op)) {
          std::vector<std::string> dimensional;
          for (const auto& c : cols)
            if (!c.geometric_component && !c.dim.dimensionless())
              dimensional.push_back(c.column);
          if (!dimensional.empty())
            out.push_back({"R4", Severity::kError,
                           at + ": non-homogeneous nonlinearity '" + op.name +
                               "' applied to a dimensional scalar; only dimensionless "
                               "arguments (or homogeneous functions) are covariant",
                           dimensional});
        }
        break;
      }
      case PipelineOp::Kind::kNormalize: {
        if (!op.per_component) break;
        const auto refs = op.columns.empty()
                              ? [&] {
                                  std::vector<std::string> all;
                                  for (const auto& f : schema.features()) all.push_back(f.name);
                                  return all;
                                }()
                              : op.columns;
        const auto cols = detail::resolve_columns(schema, refs);
        std::vector<std::string> offending;
        std::set<std::string> seen;
        for (const auto& c : cols)
          if (c.geometric_component && seen.insert(c.feature).second)
            offending.push_back(c.feature);
        if (!offending.empty())
          out.push_back({"R6", Severity::kError,
                         at + ": per-component normalization of vector/tensor features; "
                              "the components must be scaled identically, not independently",
                         offending});
        break;
      }
      case PipelineOp::Kind::kLoss: {
        bool mixed = false;
        for (std::size_t i = 1; i < op.loss_terms.size(); ++i)
          if (!(op.loss_terms[i].second == op.loss_terms[0].second)) mixed = true;
        if (mixed) {
          std::vector<std::string> names;
          for (const auto& [nm, d] : op.loss_terms) names.push_back(nm);
          out.push_back({"R7", Severity::kError,
                         at + ": loss sums terms with different units; convert all "
                              "contributions to the same units before combining",
                         names});
        }
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Empirical commuting-diagram tests
// ---------------------------------------------------------------------------

enum class GroupTag { kO3, kO3Proper, kUnitsRescaling };

inline const char* to_string(GroupTag g) {
  switch (g) {
    case GroupTag::kO3: return "O3";
    case GroupTag::kO3Proper: return "O3-proper";
    case GroupTag::kUnitsRescaling: return "UnitsRescaling";
  }
  return "?";
}
inline GroupTag group_tag_from_string(const std::string& s) {
  if (s == "O3") return GroupTag::kO3;
  if (s == "O3-proper") return GroupTag::kO3Proper;
  if (s == "UnitsRescaling") return GroupTag::kUnitsRescaling;
  throw DomainError("unknown group tag '" + s + "'");
}

/// One sampled element of the test group.
struct GroupElement {
  GroupTag tag = GroupTag::kO3;
  std::optional<Orthogonal3> rotation;  // O3 variants
  UnitScaling scaling;                  // units rescaling

  static GroupElement identity(GroupTag tag) {
    GroupElement e;
    e.tag = tag;
    if (tag != GroupTag::kUnitsRescaling) e.rotation = Orthogonal3::identity();
    return e;
  }

  /// Haar rotation, or log-uniform scales in [e^-3, e^3] per base unit.
  static GroupElement sample(GroupTag tag, std::uint64_t seed) {
    GroupElement e;
    e.tag = tag;
    if (tag == GroupTag::kUnitsRescaling) {
      rng::Engine eng(seed);
      for (int i = 0; i < kNumBaseUnits; ++i) e.scaling.scale[i] = std::exp(eng.uniform(-3.0, 3.0));
    } else {
      e.rotation = haar_orthogonal(seed, tag == GroupTag::kO3Proper);
    }
    return e;
  }
};

inline GeomFeature transform_feature(const GeomFeature& f, const GroupElement& e) {
  if (e.tag != GroupTag::kUnitsRescaling) return rotate_feature(f, *e.rotation);
  GeomFeature out = f;
  const double factor = e.scaling.factor(f.dim());
  switch (f.kind()) {
    case FeatureKind::kScalar:
      out.value = Quantity{f.scalar().value * factor, f.scalar().dim};
      break;
    case FeatureKind::kVector3: {
      Vec3 v = f.vector();
      for (int i = 0; i < 3; ++i) v.c[i] *= factor;
      out.value = v;
      break;
    }
    case FeatureKind::kTensor3: {
      Tensor3 t = f.tensor();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.c[i][j] *= factor;
      out.value = t;
      break;
    }
  }
  return out;
}

/// Applies the group element to the listed features (all when empty).
inline Record transform_record(const Record& rec, const GroupElement& e,
                               const std::vector<std::string>& which = {}) {
  Record out = rec;
  for (auto& f : out) {
    if (!which.empty() &&
        std::find(which.begin(), which.end(), f.name) == which.end())
      continue;
    f = transform_feature(f, e);
  }
  return out;
}

/// ||a - b|| / (||a|| + ||b|| + eps) over flattened components.
inline double feature_deviation(const GeomFeature& a, const GeomFeature& b) {
  const auto fa = record_components({a});
  const auto fb = record_components({b});
  if (fa.size() != fb.size())
    throw SchemaMismatchError("feature_deviation: outputs of different kinds");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    diff += (fa[i] - fb[i]) * (fa[i] - fb[i]);
    na += fa[i] * fa[i];
    nb += fb[i] * fb[i];
  }
  return std::sqrt(diff) / (std::sqrt(na) + std::sqrt(nb) + 1e-30);
}

struct CovarianceTestSpec {
  GroupTag group = GroupTag::kO3;
  int trials = 32;
  std::uint64_t seed = 1;
  double tolerance = 1e-8;
  std::vector<std::string> transform_features;  // empty: transform everything

  void validate() const {
    if (trials < 1) throw DomainError("CovarianceTestSpec: trials >= 1");
    if (!(tolerance > 0.0)) throw DomainError("CovarianceTestSpec: tolerance > 0");
  }
};

struct CovarianceReport {
  GroupTag group = GroupTag::kO3;
  int trials = 0;
  double tolerance = 0.0;
  std::vector<double> trial_deviations;  // max over probes, per trial
  double max_deviation = 0.0;
  bool pass = false;
  double self_check_deviation = 0.0;

  Json to_json() const {
    Json j;
    j["group"] = to_string(group);
    j["trials"] = trials;
    j["tolerance"] = tolerance;
    j["trial_deviations"] = trial_deviations;
    j["max_deviation"] = max_deviation;
    j["pass"] = pass;
    j["self_check_deviation"] = self_check_deviation;
    return j;
  }
};

using SchemaFn = std::function<GeomFeature(const Record&)>;

/// Max relative deviation of fn from equivariance under one group element.
inline double covariance_deviation(const SchemaFn& fn, const GroupElement& e,
                                   const std::vector<Record>& probes,
                                   const std::vector<std::string>& which = {}) {
  double worst = 0.0;
  for (const auto& rec : probes) {
    const GeomFeature lhs = fn(transform_record(rec, e, which));
    const GeomFeature rhs = transform_feature(fn(rec), e);
    worst = std::max(worst, feature_deviation(lhs, rhs));
  }
  return worst;
}

namespace detail {

/// Equivariant-by-construction fixture used as the harness self check:
/// out = v1 * (v1.v2)/(v2.v2), covariant under O(3) and units rescaling.
inline double self_check_deviation(GroupTag tag, std::uint64_t seed) {
  Record probe1{{"v1", Vec3{1.0, 2.0, 3.0, units::m()}},
                {"v2", Vec3{0.5, -1.0, 2.0, units::m()}}};
  Record probe2{{"v1", Vec3{-0.3, 1.1, 0.7, units::m()}},
                {"v2", Vec3{2.0, 0.4, -1.5, units::m()}}};
  SchemaFn fn = [](const Record& r) {
    const Vec3& v1 = r[0].vector();
    const Vec3& v2 = r[1].vector();
    const double c = dot(v1, v2).value / dot(v2, v2).value;
    return GeomFeature{"out", equivariant_combination({c, 0.0}, {v1, v2})};
  };
  double worst = 0.0;
  for (int t = 0; t < 4; ++t) {
    const auto e = GroupElement::sample(tag, rng::derive_seed(seed, {0x5e1fu, static_cast<std::uint64_t>(t)}));
    worst = std::max(worst, covariance_deviation(fn, e, {probe1, probe2}));
  }
  return worst;
}

}  // namespace detail

/// Samples group elements and reports the worst deviation per trial. The
/// construction-equivariant fixture runs first on every invocation; if it
/// fails at 1e-10 the harness itself is broken and a logic_error is thrown.
/// A failing model is report content, never an exception.
inline CovarianceReport test_covariance(const SchemaFn& fn, const CovarianceTestSpec& spec,
                                        const std::vector<Record>& probes) {
  spec.validate();
  if (probes.empty()) throw DomainError("test_covariance: need at least one probe");
  CovarianceReport rep;
  rep.group = spec.group;
  rep.trials = spec.trials;
  rep.tolerance = spec.tolerance;
  rep.self_check_deviation = detail::self_check_deviation(spec.group, spec.seed);
  if (rep.self_check_deviation > 1e-10)
    throw std::logic_error("test_covariance: harness self-check failed");
  for (int t = 0; t < spec.trials; ++t) {
    const auto e =
        GroupElement::sample(spec.group, rng::derive_seed(spec.seed, {static_cast<std::uint64_t>(t)}));
    rep.trial_deviations.push_back(
        covariance_deviation(fn, e, probes, spec.transform_features));
  }
  rep.max_deviation = 0.0;
  for (double d : rep.trial_deviations) rep.max_deviation = std::max(rep.max_deviation, d);
  rep.pass = rep.max_deviation <= spec.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------
// Model-backed schema functions for the covtest CLI
// ---------------------------------------------------------------------------

struct SchemaFunction {
  SchemaFn fn;
  FeatureKind out_kind = FeatureKind::kScalar;
  Dimension out_dim;
};

/// Builds a black-box record function from a serialized model description.
/// Supported types: "raw_mlp" (MLP over the flat component list — the
/// negative control), "scalarized_mlp" (coefficients from Gram invariants
/// times the vector basis — equivariant by construction), "units_covariant"
/// (a serialized UnitsCovariantModel over the scalar features).
inline SchemaFunction make_schema_function(const Json& model, const FeatureSchema& schema) {
  const auto type = model.at("type").get<std::string>();
  SchemaFunction out;
  if (model.contains("output")) {
    const auto& o = model.at("output");
    const auto kind = o.at("kind").get<std::string>();
    out.out_kind = kind == "scalar" ? FeatureKind::kScalar
                   : kind == "vector3" ? FeatureKind::kVector3
                                       : FeatureKind::kTensor3;
    if (o.contains("dim")) out.out_dim = Dimension::from_json(o.at("dim"));
  }

  if (type == "raw_mlp") {
    const Mlp mlp = Mlp::from_json(model.at("mlp"));
    if (mlp.in_width() != schema.column_count())
      throw SchemaMismatchError("raw_mlp: MLP input width != schema column count");
    const FeatureKind kind = out.out_kind;
    const Dimension dim = out.out_dim;
    out.fn = [mlp, kind, dim](const Record& rec) {
      const auto x = record_components(rec);
      const auto y = mlp.predict(x);
      GeomFeature g;
      g.name = "out";
      if (kind == FeatureKind::kScalar) {
        g.value = Quantity{y.at(0), dim};
      } else if (kind == FeatureKind::kVector3) {
        g.value = Vec3{y.at(0), y.at(1), y.at(2), dim};
      } else {
        Mat3 m{};
        for (int i = 0; i < 9; ++i) m[i / 3][i % 3] = y.at(i);
        g.value = Tensor3{m, dim};
      }
      return g;
    };
    return out;
  }

  if (type == "scalarized_mlp") {
    const Mlp mlp = Mlp::from_json(model.at("mlp"));
    std::vector<std::string> vector_names;
    for (const auto& f : schema.features())
      if (f.kind == FeatureKind::kVector3) vector_names.push_back(f.name);
    if (vector_names.empty())
      throw SchemaMismatchError("scalarized_mlp: schema has no vector features");
    out.fn = [mlp, vector_names](const Record& rec) {
      std::vector<Vec3> basis;
      std::vector<double> scalars;
      for (const auto& f : rec) {
        if (f.kind() == FeatureKind::kVector3) basis.push_back(f.vector());
        if (f.kind() == FeatureKind::kScalar) scalars.push_back(f.scalar().value);
      }
      const auto gram = gram_invariants(basis);
      std::vector<double> x = scalars;
      for (int i = 0; i < gram.n; ++i)
        for (int j = i; j < gram.n; ++j) x.push_back(gram.at(i, j).value);
      const auto coeffs = mlp.predict(x);
      return GeomFeature{"out", equivariant_combination(
                                     std::vector<double>(coeffs.begin(),
                                                         coeffs.begin() + basis.size()),
                                     basis)};
    };
    out.out_kind = FeatureKind::kVector3;
    return out;
  }

  if (type == "units_covariant") {
    const UnitsCovariantModel m = UnitsCovariantModel::from_json(model.at("model"));
    out.out_kind = FeatureKind::kScalar;
    out.out_dim = m.target_dim;
    out.fn = [m](const Record& rec) {
      std::vector<double> x;
      for (const auto& name : m.input_names) {
        bool found = false;
        for (const auto& f : rec)
          if (f.name == name && f.kind() == FeatureKind::kScalar) {
            x.push_back(f.scalar().value);
            found = true;
            break;
          }
        if (!found)
          throw SchemaMismatchError("units_covariant: record missing scalar '" + name + "'");
      }
      return GeomFeature{"out", Quantity{m.predict(x), m.target_dim}};
    };
    return out;
  }

  throw SchemaMismatchError("unknown model type '" + type + "'");
}

/// Seeded schema-conforming probe records. Scalars are positive (log-normal)
/// under units rescaling so log-space models stay in domain.
inline std::vector<Record> generate_probes(const FeatureSchema& schema, GroupTag group,
                                           int count, std::uint64_t seed) {
  std::vector<Record> probes;
  for (int p = 0; p < count; ++p) {
    rng::Engine eng(rng::derive_seed(seed, {0x9b0beULL, static_cast<std::uint64_t>(p)}));
    Record rec;
    for (const auto& f : schema.features()) {
      GeomFeature g;
      g.name = f.name;
      if (f.kind == FeatureKind::kScalar) {
        const double v = group == GroupTag::kUnitsRescaling ? std::exp(0.5 * eng.normal())
                                                            : eng.normal();
        g.value = Quantity{v, f.dim};
      } else if (f.kind == FeatureKind::kVector3) {
        g.value = Vec3{eng.normal(), eng.normal(), eng.normal(), f.dim};
      } else {
        Mat3 m{};
        for (int i = 0; i < 9; ++i) m[i / 3][i % 3] = eng.normal();
        g.value = Tensor3{m, f.dim};
      }
      rec.push_back(std::move(g));
    }
    probes.push_back(std::move(rec));
  }
  return probes;
}

}  // namespace pasym
