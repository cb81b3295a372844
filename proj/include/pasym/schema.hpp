#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/geometry.hpp"
#include "pasym/json_io.hpp"

namespace pasym {

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kScalar;
  Dimension dim;

  int column_count() const {
    switch (kind) {
      case FeatureKind::kScalar: return 1;
      case FeatureKind::kVector3: return 3;
      case FeatureKind::kTensor3: return 9;
    }
    return 0;
  }
};

inline const std::array<const char*, 3> kVectorSuffixes{".x", ".y", ".z"};
inline const std::array<const char*, 9> kTensorSuffixes{".xx", ".xy", ".xz", ".yx", ".yy",
                                                        ".yz", ".zx", ".zy", ".zz"};

/// Ordered feature declarations plus the induced column layout: scalars map
/// to one column, vectors to name.x/.y/.z, tensors to name.xx ... name.zz.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    std::set<std::string> seen;
    for (const auto& f : features_) {
      if (f.name.empty()) throw SchemaMismatchError("schema: empty feature name");
      if (!seen.insert(f.name).second)
        throw SchemaMismatchError("schema: duplicate feature name '" + f.name + "'");
    }
  }

  const std::vector<FeatureSpec>& features() const { return features_; }

  const FeatureSpec& feature(const std::string& name) const {
    for (const auto& f : features_)
      if (f.name == name) return f;
    throw SchemaMismatchError("schema: no feature named '" + name + "'");
  }
  bool has_feature(const std::string& name) const {
    for (const auto& f : features_)
      if (f.name == name) return true;
    return false;
  }

  std::vector<std::string> columns() const {
    std::vector<std::string> cols;
    for (const auto& f : features_) {
      switch (f.kind) {
        case FeatureKind::kScalar: cols.push_back(f.name); break;
        case FeatureKind::kVector3:
          for (const auto* s : kVectorSuffixes) cols.push_back(f.name + s);
          break;
        case FeatureKind::kTensor3:
          for (const auto* s : kTensorSuffixes) cols.push_back(f.name + s);
          break;
      }
    }
    return cols;
  }

  int column_count() const {
    int n = 0;
    for (const auto& f : features_) n += f.column_count();
    return n;
  }

  /// Offset of a feature's first column in the schema column order.
  int column_offset(const std::string& name) const {
    int off = 0;
    for (const auto& f : features_) {
      if (f.name == name) return off;
      off += f.column_count();
    }
    throw SchemaMismatchError("schema: no feature named '" + name + "'");
  }

  /// Resolves a column name to its owning feature; component_index is the
  /// position within the feature (0 for scalars).
  struct ColumnInfo {
    const FeatureSpec* feature;
    int component_index;
    bool geometric_component;  // true for vector/tensor components
  };
  ColumnInfo column_info(const std::string& column) const {
    for (const auto& f : features_) {
      if (f.kind == FeatureKind::kScalar) {
        if (column == f.name) return {&f, 0, false};
      } else if (f.kind == FeatureKind::kVector3) {
        for (int i = 0; i < 3; ++i)
          if (column == f.name + kVectorSuffixes[i]) return {&f, i, true};
      } else {
        for (int i = 0; i < 9; ++i)
          if (column == f.name + kTensorSuffixes[i]) return {&f, i, true};
      }
    }
    throw SchemaMismatchError("schema: no column named '" + column + "'");
  }

  Json to_json() const {
    Json j;
    j["version"] = 1;
    j["features"] = Json::array();
    for (const auto& f : features_) {
      Json e;
      e["name"] = f.name;
      e["kind"] = to_string(f.kind);
      e["dim"] = f.dim.to_json();
      j["features"].push_back(e);
    }
    return j;
  }

  static FeatureSchema from_json(const Json& j) {
    std::vector<FeatureSpec> specs;
    if (!j.contains("features")) throw SchemaMismatchError("schema json: missing 'features'");
    for (const auto& e : j.at("features")) {
      FeatureSpec f;
      f.name = e.at("name").get<std::string>();
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "scalar")
        f.kind = FeatureKind::kScalar;
      else if (kind == "vector3")
        f.kind = FeatureKind::kVector3;
      else if (kind == "tensor3")
        f.kind = FeatureKind::kTensor3;
      else
        throw SchemaMismatchError("schema json: unknown kind '" + kind + "'");
      if (e.contains("dim")) f.dim = Dimension::from_json(e.at("dim"));
      specs.push_back(std::move(f));
    }
    return FeatureSchema(std::move(specs));
  }

 private:
  std::vector<FeatureSpec> features_;
};

/// Column-labelled table of doubles, the CSV-facing data container.
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return rows.size(); }

  int column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    throw SchemaMismatchError("dataset: no column named '" + name + "'");
  }

  void check_rectangular() const {
    for (const auto& r : rows)
      if (r.size() != columns.size())
        throw SchemaMismatchError("dataset: ragged row");
  }

  static Dataset read_csv(std::istream& in) {
    Dataset d;
    std::string line;
    if (!std::getline(in, line)) throw DomainError("csv: empty input");
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) d.columns.push_back(cell);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      if (row.size() != d.columns.size()) throw DomainError("csv: ragged row");
      d.rows.push_back(std::move(row));
    }
    return d;
  }
  static Dataset read_csv_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DomainError("cannot open: " + path);
    return read_csv(f);
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << columns[i] << (i + 1 == columns.size() ? '\n' : ',');
    char buf[40];
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
        os << buf << (i + 1 == row.size() ? '\n' : ',');
      }
    }
  }
  void write_csv_file(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open for writing: " + path);
    write_csv(f);
  }
};

/// One schema-typed observation.
using Record = std::vector<GeomFeature>;

/// Verifies every schema column is present and returns schema-ordered column
/// indices into the dataset.
inline std::vector<int> schema_column_indices(const FeatureSchema& schema, const Dataset& data) {
  std::vector<int> idx;
  for (const auto& col : schema.columns()) idx.push_back(data.column_index(col));
  return idx;
}

inline Record row_to_record(const FeatureSchema& schema, const Dataset& data, std::size_t row,
                            const std::vector<int>& col_idx) {
  Record rec;
  const auto& r = data.rows[row];
  std::size_t k = 0;
  for (const auto& f : schema.features()) {
    GeomFeature g;
    g.name = f.name;
    switch (f.kind) {
      case FeatureKind::kScalar:
        g.value = Quantity{r[col_idx[k]], f.dim};
        k += 1;
        break;
      case FeatureKind::kVector3:
        g.value = Vec3{r[col_idx[k]], r[col_idx[k + 1]], r[col_idx[k + 2]], f.dim};
        k += 3;
        break;
      case FeatureKind::kTensor3: {
        Mat3 m{};
        for (int i = 0; i < 9; ++i) m[i / 3][i % 3] = r[col_idx[k + i]];
        g.value = Tensor3{m, f.dim};
        k += 9;
        break;
      }
    }
    rec.push_back(std::move(g));
  }
  return rec;
}

/// All components of a record flattened in schema column order.
inline std::vector<double> record_components(const Record& rec) {
  std::vector<double> out;
  for (const auto& g : rec) {
    switch (g.kind()) {
      case FeatureKind::kScalar: out.push_back(g.scalar().value); break;
      case FeatureKind::kVector3:
        for (int i = 0; i < 3; ++i) out.push_back(g.vector().c[i]);
        break;
      case FeatureKind::kTensor3:
        for (int i = 0; i < 9; ++i) out.push_back(g.tensor().c[i / 3][i % 3]);
        break;
    }
  }
  return out;
}

}  // namespace pasym
