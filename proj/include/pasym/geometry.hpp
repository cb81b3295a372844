#pragma once

#include <array>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/linalg.hpp"
#include "pasym/random.hpp"

namespace pasym {

using Arr3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// A physical 3-vector: three components sharing one Dimension.
struct Vec3 {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  Dimension dim;

  Vec3() = default;
  Vec3(double x, double y, double z, Dimension d = {}) : c{x, y, z}, dim(std::move(d)) {}
  Vec3(std::array<double, 3> comps, Dimension d = {}) : c(comps), dim(std::move(d)) {}

  double operator[](int i) const { return c[i]; }
  double& operator[](int i) { return c[i]; }

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    if (!(a.dim == b.dim)) throw MixedDimsError("Vec3: cannot add different dimensions");
    return {a.c[0] + b.c[0], a.c[1] + b.c[1], a.c[2] + b.c[2], a.dim};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    if (!(a.dim == b.dim)) throw MixedDimsError("Vec3: cannot subtract different dimensions");
    return {a.c[0] - b.c[0], a.c[1] - b.c[1], a.c[2] - b.c[2], a.dim};
  }
  friend Vec3 operator*(double k, const Vec3& v) {
    return {k * v.c[0], k * v.c[1], k * v.c[2], v.dim};
  }

  double norm() const { return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]); }
};

/// Inner product; the scalar picks up the product Dimension.
inline Quantity dot(const Vec3& a, const Vec3& b) {
  return {a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2], a.dim * b.dim};
}

/// A physical 3x3 tensor (2-tensor) with one Dimension for all entries.
struct Tensor3 {
  Mat3 c{{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
  Dimension dim;

  Tensor3() = default;
  Tensor3(Mat3 comps, Dimension d = {}) : c(comps), dim(std::move(d)) {}

  static Tensor3 identity(Dimension d = {}) {
    return {{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}, std::move(d)};
  }

  friend Tensor3 operator-(const Tensor3& a, const Tensor3& b) {
    if (!(a.dim == b.dim)) throw MixedDimsError("Tensor3: cannot subtract different dimensions");
    Tensor3 r;
    r.dim = a.dim;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.c[i][j] = a.c[i][j] - b.c[i][j];
    return r;
  }
};

namespace detail {
inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}
inline Mat3 transpose(const Mat3& a) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}
inline double det3(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}
}  // namespace detail

/// Element of O(3), validated on construction: R^T R = I within 1e-12 and
/// det R = +-1 within 1e-12.
class Orthogonal3 {
 public:
  static constexpr double kTol = 1e-12;

  static Orthogonal3 identity() {
    return Orthogonal3({{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
  }

  static Orthogonal3 from_matrix(const Mat3& m) { return Orthogonal3(m); }

  /// Rotation about a (normalized internally) axis by angle, Rodrigues form.
  static Orthogonal3 axis_angle(const std::array<double, 3>& axis, double angle) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (n == 0.0) throw DomainError("Orthogonal3: zero axis");
    const double ux = axis[0] / n, uy = axis[1] / n, uz = axis[2] / n;
    const double cth = std::cos(angle), sth = std::sin(angle), one = 1.0 - cth;
    Mat3 m{{{cth + ux * ux * one, ux * uy * one - uz * sth, ux * uz * one + uy * sth},
            {uy * ux * one + uz * sth, cth + uy * uy * one, uy * uz * one - ux * sth},
            {uz * ux * one - uy * sth, uz * uy * one + ux * sth, cth + uz * uz * one}}};
    return Orthogonal3(m);
  }

  const Mat3& matrix() const { return m_; }
  double det() const { return detail::det3(m_); }

  std::array<double, 3> apply(const std::array<double, 3>& v) const {
    return {m_[0][0] * v[0] + m_[0][1] * v[1] + m_[0][2] * v[2],
            m_[1][0] * v[0] + m_[1][1] * v[1] + m_[1][2] * v[2],
            m_[2][0] * v[0] + m_[2][1] * v[1] + m_[2][2] * v[2]};
  }
  Vec3 apply(const Vec3& v) const { return {apply(v.c), v.dim}; }

  /// Conjugation R T R^T for 2-tensors.
  Tensor3 conjugate(const Tensor3& t) const {
    return {detail::matmul(detail::matmul(m_, t.c), detail::transpose(m_)), t.dim};
  }

  Orthogonal3 composed_after(const Orthogonal3& first) const {
    return Orthogonal3(detail::matmul(m_, first.m_));
  }
  Orthogonal3 transposed() const { return Orthogonal3(detail::transpose(m_)); }

 private:
  explicit Orthogonal3(const Mat3& m) : m_(m) { validate(); }

  void validate() const {
    const Mat3 rtr = detail::matmul(detail::transpose(m_), m_);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double want = i == j ? 1.0 : 0.0;
        if (std::abs(rtr[i][j] - want) > kTol)
          throw DomainError("Orthogonal3: matrix is not orthogonal within 1e-12");
      }
    if (std::abs(std::abs(detail::det3(m_)) - 1.0) > kTol)
      throw DomainError("Orthogonal3: determinant is not +-1 within 1e-12");
  }

  Mat3 m_;
};

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix (Gram-Schmidt,
/// which fixes R's diagonal positive). With proper_only, the det=-1 coset is
/// mapped onto SO(3) by negating the first column.
inline Orthogonal3 haar_orthogonal(std::uint64_t seed, bool proper_only = false) {
  rng::Engine eng(seed);
  Mat3 a{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = eng.normal();
  Mat3 q{};
  for (int j = 0; j < 3; ++j) {
    std::array<double, 3> v{a[0][j], a[1][j], a[2][j]};
    for (int k = 0; k < j; ++k) {
      double proj = 0.0;
      for (int i = 0; i < 3; ++i) proj += q[i][k] * v[i];
      for (int i = 0; i < 3; ++i) v[i] -= proj * q[i][k];
    }
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    for (int i = 0; i < 3; ++i) q[i][j] = v[i] / n;
  }
  if (proper_only && detail::det3(q) < 0.0)
    for (int i = 0; i < 3; ++i) q[i][0] = -q[i][0];
  return Orthogonal3::from_matrix(q);
}

enum class FeatureKind { kScalar, kVector3, kTensor3 };

inline const char* to_string(FeatureKind k) {
  switch (k) {
    case FeatureKind::kScalar: return "scalar";
    case FeatureKind::kVector3: return "vector3";
    case FeatureKind::kTensor3: return "tensor3";
  }
  return "?";
}

/// Named geometric value: exactly one of scalar, 3-vector, 3x3 tensor.
struct GeomFeature {
  std::string name;
  std::variant<Quantity, Vec3, Tensor3> value;

  FeatureKind kind() const { return static_cast<FeatureKind>(value.index()); }
  const Quantity& scalar() const { return std::get<Quantity>(value); }
  const Vec3& vector() const { return std::get<Vec3>(value); }
  const Tensor3& tensor() const { return std::get<Tensor3>(value); }

  Dimension dim() const {
    switch (kind()) {
      case FeatureKind::kScalar: return scalar().dim;
      case FeatureKind::kVector3: return vector().dim;
      case FeatureKind::kTensor3: return tensor().dim;
    }
    return {};
  }
};

/// Coordinate change: scalars fixed, vectors -> R v, tensors -> R T R^T.
inline GeomFeature rotate_feature(const GeomFeature& f, const Orthogonal3& r) {
  GeomFeature out = f;
  switch (f.kind()) {
    case FeatureKind::kScalar: break;
    case FeatureKind::kVector3: out.value = r.apply(f.vector()); break;
    case FeatureKind::kTensor3: out.value = r.conjugate(f.tensor()); break;
  }
  return out;
}

/// Symmetric matrix of pairwise inner products: the complete O(3)-invariant
/// scalarization of a list of vectors.
struct GramMatrix {
  int n = 0;
  std::vector<Quantity> entries;  // row-major n x n

  const Quantity& at(int i, int j) const { return entries[i * n + j]; }
};

inline GramMatrix gram_invariants(const std::vector<Vec3>& vectors) {
  if (vectors.empty()) throw DomainError("gram_invariants: empty vector list");
  GramMatrix g;
  g.n = static_cast<int>(vectors.size());
  g.entries.resize(static_cast<std::size_t>(g.n) * g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) g.entries[i * g.n + j] = dot(vectors[i], vectors[j]);
  return g;
}

/// sum_j coeffs[j] * vectors[j]. All vectors must share one Dimension; mixing
/// units in a sum is itself a covariance violation, so it is an error here.
inline Vec3 equivariant_combination(const std::vector<double>& coeffs,
                                    const std::vector<Vec3>& vectors) {
  if (coeffs.size() != vectors.size())
    throw DomainError("equivariant_combination: length mismatch");
  if (vectors.empty()) throw DomainError("equivariant_combination: empty");
  const Dimension& d = vectors[0].dim;
  for (const auto& v : vectors)
    if (!(v.dim == d))
      throw MixedDimsError("equivariant_combination: summands have different dimensions");
  Vec3 out(0.0, 0.0, 0.0, d);
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (int i = 0; i < 3; ++i) out.c[i] += coeffs[j] * vectors[j].c[i];
  return out;
}

/// Largest singular value via Jacobi eigendecomposition of T^T T.
inline Quantity spectral_norm(const Tensor3& t) {
  linalg::Matrix a(3, std::vector<double>(3, 0.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += t.c[k][i] * t.c[k][j];
      a[i][j] = s;
    }
  const auto eig = linalg::jacobi_eigen(std::move(a), 1e-12, 100);
  double max_ev = 0.0;
  for (double ev : eig.values) max_ev = std::max(max_ev, ev);
  return {std::sqrt(std::max(0.0, max_ev)), t.dim};
}

}  // namespace pasym
