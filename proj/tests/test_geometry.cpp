#include "pasym/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "pasym/random.hpp"

namespace pasym {
namespace {

constexpr double kPi = 3.14159265358979323846;

TEST(Orthogonal3, ValidatesInput) {
  Mat3 not_orthogonal{{{1, 0, 0}, {0, 1, 0}, {0, 0, 2}}};
  EXPECT_THROW(Orthogonal3::from_matrix(not_orthogonal), DomainError);
  EXPECT_NO_THROW(Orthogonal3::identity());
}

TEST(RotateFeature, Examples) {
  const auto r = Orthogonal3::axis_angle({0, 0, 1}, kPi / 2.0);
  // scalars are untouched
  GeomFeature s{"a", Quantity{3.0, units::K()}};
  EXPECT_DOUBLE_EQ(rotate_feature(s, r).scalar().value, 3.0);
  // (1,0,0) under rotation by pi/2 about z -> (0,1,0)
  GeomFeature v{"v", Vec3{1.0, 0.0, 0.0, units::m()}};
  const auto rv = rotate_feature(v, r).vector();
  EXPECT_NEAR(rv[0], 0.0, 1e-15);
  EXPECT_NEAR(rv[1], 1.0, 1e-15);
  EXPECT_NEAR(rv[2], 0.0, 1e-15);
  // identity tensor is fixed by conjugation
  GeomFeature t{"t", Tensor3::identity(units::energy())};
  const auto rt = rotate_feature(t, r).tensor();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(rt.c[i][j], i == j ? 1.0 : 0.0, 1e-15);
}

TEST(RotateFeature, GroupAction) {
  for (int t = 0; t < 8; ++t) {
    const auto r1 = haar_orthogonal(rng::derive_seed(11, {static_cast<std::uint64_t>(t), 1}));
    const auto r2 = haar_orthogonal(rng::derive_seed(11, {static_cast<std::uint64_t>(t), 2}));
    GeomFeature f{"v", Vec3{0.3, -1.2, 2.1, units::velocity()}};
    const auto lhs = rotate_feature(rotate_feature(f, r1), r2).vector();
    const auto rhs = rotate_feature(f, r2.composed_after(r1)).vector();
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12);
  }
}

TEST(GramInvariants, Examples) {
  // orthonormal pair -> 2x2 identity
  const auto g = gram_invariants({Vec3{1, 0, 0, units::m()}, Vec3{0, 1, 0, units::m()}});
  EXPECT_DOUBLE_EQ(g.at(0, 0).value, 1.0);
  EXPECT_DOUBLE_EQ(g.at(0, 1).value, 0.0);
  EXPECT_DOUBLE_EQ(g.at(1, 1).value, 1.0);
  EXPECT_EQ(g.at(0, 0).dim, units::m().pow(2));
  // single vector: squared norm
  const auto g1 = gram_invariants({Vec3{1, 2, 2, units::m()}});
  EXPECT_DOUBLE_EQ(g1.at(0, 0).value, 9.0);
  EXPECT_THROW(gram_invariants({}), DomainError);
}

TEST(GramInvariants, RotationInvariance32Seeds) {
  const std::vector<Vec3> vectors{Vec3{0.4, -1.1, 0.9, units::m()},
                                  Vec3{2.0, 0.3, -0.7, units::m()},
                                  Vec3{-0.2, 0.8, 1.5, units::m()}};
  const auto base = gram_invariants(vectors);
  for (int t = 0; t < 32; ++t) {
    const auto r = haar_orthogonal(rng::derive_seed(17, {static_cast<std::uint64_t>(t)}));
    std::vector<Vec3> rotated;
    for (const auto& v : vectors) rotated.push_back(r.apply(v));
    const auto g = gram_invariants(rotated);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) {
        const double ref = base.at(i, j).value;
        EXPECT_NEAR(g.at(i, j).value, ref, 1e-12 * (std::abs(ref) + 1.0));
      }
  }
}

TEST(EquivariantCombination, Examples) {
  const Vec3 a{1, 0, 0, units::m()}, b{0, 1, 0, units::m()};
  // selection
  const auto sel = equivariant_combination({1.0, 0.0}, {a, b});
  EXPECT_DOUBLE_EQ(sel[0], 1.0);
  EXPECT_DOUBLE_EQ(sel[1], 0.0);
  // sum
  const auto sum = equivariant_combination({1.0, 1.0}, {a, b});
  EXPECT_DOUBLE_EQ(sum[0], 1.0);
  EXPECT_DOUBLE_EQ(sum[1], 1.0);
  // mixing dimensions is a units-covariance violation
  const Vec3 c{0, 0, 1, units::s()};
  EXPECT_THROW(equivariant_combination({1.0, 1.0}, {a, c}), MixedDimsError);
}

TEST(EquivariantCombination, CommutesWithRotation) {
  // coefficients computed from gram invariants; the full active diagram
  const std::vector<Vec3> vectors{Vec3{0.4, -1.1, 0.9, units::m()},
                                  Vec3{2.0, 0.3, -0.7, units::m()}};
  auto coeff_fn = [](const GramMatrix& g) {
    return std::vector<double>{g.at(0, 1).value / (1.0 + g.at(1, 1).value),
                               g.at(0, 0).value / (1.0 + g.at(0, 1).value * g.at(0, 1).value)};
  };
  const auto out = equivariant_combination(coeff_fn(gram_invariants(vectors)), vectors);
  for (int t = 0; t < 32; ++t) {
    const auto r = haar_orthogonal(rng::derive_seed(23, {static_cast<std::uint64_t>(t)}));
    std::vector<Vec3> rotated;
    for (const auto& v : vectors) rotated.push_back(r.apply(v));
    const auto lhs = equivariant_combination(coeff_fn(gram_invariants(rotated)), rotated);
    const auto rhs = r.apply(out);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * (1.0 + std::abs(rhs[i])));
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_NEAR(spectral_norm(Tensor3::identity()).value, 1.0, 1e-12);
  Tensor3 d{{{{3, 0, 0}, {0, -1, 0}, {0, 0, 0}}}, units::m()};
  EXPECT_NEAR(spectral_norm(d).value, 3.0, 1e-12);
  EXPECT_EQ(spectral_norm(d).dim, units::m());
}

TEST(SpectralNorm, OrthogonalInvariance) {
  rng::Engine eng(5);
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = eng.normal();
  const Tensor3 t{m, units::s()};
  const double base = spectral_norm(t).value;
  for (int k = 0; k < 32; ++k) {
    const auto r = haar_orthogonal(rng::derive_seed(31, {static_cast<std::uint64_t>(k)}));
    EXPECT_NEAR(spectral_norm(r.conjugate(t)).value, base, 1e-10 * base);
  }
}

TEST(HaarOrthogonal, DefiningProperties) {
  for (std::uint64_t seed : {1ull, 2ull, 99ull, 12345ull}) {
    const auto r = haar_orthogonal(seed);
    const auto m = r.matrix();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double dotp = 0.0;
        for (int k = 0; k < 3; ++k) dotp += m[k][i] * m[k][j];
        EXPECT_NEAR(dotp, i == j ? 1.0 : 0.0, 1e-12);
      }
    EXPECT_NEAR(std::abs(r.det()), 1.0, 1e-12);
    EXPECT_NEAR(haar_orthogonal(seed, true).det(), 1.0, 1e-12);
  }
}

TEST(HaarOrthogonal, DeterministicPerSeed) {
  const auto a = haar_orthogonal(77).matrix();
  const auto b = haar_orthogonal(77).matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(a[i][j], b[i][j]);
  // reflections do appear in the full ensemble
  bool saw_reflection = false, saw_rotation = false;
  for (std::uint64_t s = 0; s < 64; ++s) {
    const double det = haar_orthogonal(s).det();
    saw_reflection = saw_reflection || det < 0.0;
    saw_rotation = saw_rotation || det > 0.0;
  }
  EXPECT_TRUE(saw_reflection);
  EXPECT_TRUE(saw_rotation);
}

}  // namespace
}  // namespace pasym
