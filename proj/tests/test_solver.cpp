#include "pasym/exponent_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pasym/random.hpp"

namespace pasym {
namespace {

// --- independent oracle helpers -------------------------------------------

// Direct exact check that an exponent assignment reaches the target.
bool reaches(const std::vector<Dimension>& inputs, const std::vector<Rational>& e,
             const Dimension& target) {
  return combine_dimensions(inputs, e) == target;
}

// Membership of v in span(basis) via double least squares; independent of the
// solver's rational elimination. The instances are tiny and well conditioned,
// so a 1e-9 residual cleanly separates members from non-members.
bool in_span(const std::vector<std::vector<Rational>>& basis, const std::vector<double>& v) {
  const std::size_t n = v.size(), k = basis.size();
  if (k == 0) {
    for (double x : v)
      if (std::abs(x) > 1e-9) return false;
    return true;
  }
  // normal equations G c = r
  std::vector<std::vector<double>> g(k, std::vector<double>(k, 0.0));
  std::vector<double> r(k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t i = 0; i < n; ++i) g[a][b] += basis[a][i].value() * basis[b][i].value();
    for (std::size_t i = 0; i < n; ++i) r[a] += basis[a][i].value() * v[i];
  }
  // Gaussian elimination with partial pivoting on the small dense system
  std::vector<double> c(k, 0.0);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t row = col + 1; row < k; ++row)
      if (std::abs(g[row][col]) > std::abs(g[piv][col])) piv = row;
    std::swap(g[col], g[piv]);
    std::swap(r[col], r[piv]);
    if (std::abs(g[col][col]) < 1e-12) continue;
    for (std::size_t row = col + 1; row < k; ++row) {
      const double f = g[row][col] / g[col][col];
      for (std::size_t j = col; j < k; ++j) g[row][j] -= f * g[col][j];
      r[row] -= f * r[col];
    }
  }
  for (std::size_t col = k; col-- > 0;) {
    double s = r[col];
    for (std::size_t j = col + 1; j < k; ++j) s -= g[col][j] * c[j];
    c[col] = std::abs(g[col][col]) < 1e-12 ? 0.0 : s / g[col][col];
  }
  for (std::size_t i = 0; i < n; ++i) {
    double fit = 0.0;
    for (std::size_t a = 0; a < k; ++a) fit += c[a] * basis[a][i].value();
    if (std::abs(fit - v[i]) > 1e-9) return false;
  }
  return true;
}

// Enumerates integer tuples in [-3,3]^n solving the system exactly, and
// checks the solver's solution set describes the same affine lattice.
void check_against_brute_force(const std::vector<Dimension>& inputs, const Dimension& target) {
  const int n = static_cast<int>(inputs.size());
  std::vector<std::vector<Rational>> brute;
  std::vector<int> e(n, -3);
  while (true) {
    std::vector<Rational> cand;
    for (int x : e) cand.emplace_back(x);
    if (reaches(inputs, cand, target)) brute.push_back(cand);
    int i = 0;
    for (; i < n; ++i) {
      if (e[i] < 3) {
        ++e[i];
        break;
      }
      e[i] = -3;
    }
    if (i == n) break;
  }

  bool feasible = true;
  ExponentSolution sol;
  try {
    sol = solve_target(inputs, target);
  } catch (const InfeasibleError&) {
    feasible = false;
  }

  if (!feasible) {
    EXPECT_TRUE(brute.empty()) << "solver says infeasible but brute force found solutions";
    return;
  }
  // the particular solution reaches the target exactly
  EXPECT_TRUE(reaches(inputs, sol.particular, target));
  // every nullspace element maps to the zero Dimension exactly
  for (const auto& v : sol.nullspace)
    EXPECT_TRUE(combine_dimensions(inputs, v).dimensionless());
  // every brute-force solution lies in particular + span(nullspace)
  for (const auto& b : brute) {
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = b[i].value() - sol.particular[i].value();
    EXPECT_TRUE(in_span(sol.nullspace, diff))
        << "brute-force solution outside the solver's affine lattice";
  }
}

// --- the paper's worked instances ------------------------------------------

TEST(SolveTarget, FreeFallTime) {
  // inputs {m: kg, g: m s^-2, h: m}, target s -> (0, -1/2, 1/2), unique
  const std::vector<Dimension> inputs{units::kg(), units::acceleration(), units::m()};
  const auto sol = solve_target(inputs, units::s());
  ASSERT_EQ(sol.particular.size(), 3u);
  EXPECT_EQ(sol.particular[0], Rational(0));  // no dependence on the mass
  EXPECT_EQ(sol.particular[1], Rational(-1, 2));
  EXPECT_EQ(sol.particular[2], Rational(1, 2));
  EXPECT_TRUE(sol.nullspace.empty());
  check_against_brute_force(inputs, units::s());
}

TEST(SolveTarget, ProjectileRange) {
  // inputs {m, g, v, theta}, target m -> (0, -1, 2, 0) with theta free
  const std::vector<Dimension> inputs{units::kg(), units::acceleration(), units::velocity(),
                                      Dimension{}};
  const auto sol = solve_target(inputs, units::m());
  EXPECT_EQ(sol.particular[0], Rational(0));
  EXPECT_EQ(sol.particular[1], Rational(-1));
  EXPECT_EQ(sol.particular[2], Rational(2));
  EXPECT_EQ(sol.particular[3], Rational(0));
  ASSERT_EQ(sol.nullspace.size(), 1u);
  const auto dir = primitive_integer_form(sol.nullspace[0]);
  EXPECT_EQ(dir, (std::vector<Rational>{0, 0, 0, 1}));
  check_against_brute_force(inputs, units::m());
}

Dimension radiance_dim() { return units::kg() / units::m() / units::s().pow(3); }
Dimension boltzmann_dim() { return units::energy() / units::K(); }
Dimension planck_h_dim() { return units::kg() * units::m().pow(2) / units::s(); }

TEST(SolveTarget, PrePlanckBlackbody) {
  // {lambda, T, c, k} -> B_lambda: unique (-4, 1, 1, 1), i.e. c k T / lambda^4
  const std::vector<Dimension> inputs{units::m(), units::K(), units::velocity(),
                                      boltzmann_dim()};
  const auto sol = solve_target(inputs, radiance_dim());
  EXPECT_EQ(sol.particular[0], Rational(-4));
  EXPECT_EQ(sol.particular[1], Rational(1));
  EXPECT_EQ(sol.particular[2], Rational(1));
  EXPECT_EQ(sol.particular[3], Rational(1));
  EXPECT_TRUE(sol.nullspace.empty());
  check_against_brute_force(inputs, radiance_dim());
}

TEST(SolveTarget, PlanckConstantOpensPiDirection) {
  // adding h yields one Pi direction, equivalent to h c / (lambda k T)
  const std::vector<Dimension> inputs{units::m(), units::K(), units::velocity(),
                                      boltzmann_dim(), planck_h_dim()};
  const auto basis = pi_basis(inputs);
  ASSERT_EQ(basis.size(), 1u);
  const auto b = primitive_integer_form(basis[0]);
  // (-1, -1, 1, -1, 1) up to overall sign/scaling
  const std::vector<Rational> want{-1, -1, 1, -1, 1};
  const std::vector<Rational> want_neg{1, 1, -1, 1, -1};
  EXPECT_TRUE(b == want || b == want_neg);
  check_against_brute_force(inputs, radiance_dim());
}

TEST(SolveTarget, InfeasibleTemperature) {
  const std::vector<Dimension> inputs{units::kg(), units::s()};
  EXPECT_THROW(solve_target(inputs, units::K()), InfeasibleError);
  check_against_brute_force(inputs, units::K());
}

TEST(SolveTarget, EmptyInputsRejected) {
  EXPECT_THROW(solve_target({}, units::m()), DomainError);
  EXPECT_THROW(pi_basis({}), DomainError);
}

TEST(PiBasis, Examples) {
  // {lambda, T, c, k}: no dimensionless combination
  EXPECT_TRUE(pi_basis({units::m(), units::K(), units::velocity(), boltzmann_dim()}).empty());
  // {x: m, y: m} -> ratio direction (1, -1)
  const auto basis = pi_basis({units::m(), units::m()});
  ASSERT_EQ(basis.size(), 1u);
  const auto b = primitive_integer_form(basis[0]);
  EXPECT_TRUE(b == (std::vector<Rational>{1, -1}) || b == (std::vector<Rational>{-1, 1}));
}

TEST(SolveTarget, RandomizedLatticeOracle) {
  // randomized small instances with integer dimensions in [-2,2]
  rng::Engine eng(20240817);
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 2 + static_cast<int>(eng.next_u64() % 4);  // 2..5 inputs
    std::vector<Dimension> inputs;
    for (int i = 0; i < n; ++i) {
      std::array<Rational, kNumBaseUnits> e;
      for (int u = 0; u < kNumBaseUnits; ++u)
        e[u] = Rational(static_cast<int>(eng.next_u64() % 5) - 2);
      inputs.push_back(Dimension{e});
    }
    Dimension target;
    if (inst % 2 == 0) {
      // feasible by construction: integer combination of the inputs
      for (int i = 0; i < n; ++i)
        target = target * inputs[i].pow(Rational(static_cast<int>(eng.next_u64() % 5) - 2));
    } else {
      std::array<Rational, kNumBaseUnits> e;
      for (int u = 0; u < kNumBaseUnits; ++u)
        e[u] = Rational(static_cast<int>(eng.next_u64() % 5) - 2);
      target = Dimension{e};
    }
    check_against_brute_force(inputs, target);
  }
}

TEST(SolveTarget, RationalRoundTripIsExact) {
  // for solvable instances the particular solution reproduces the target with
  // no tolerance at all
  const std::vector<Dimension> inputs{units::kg(), units::acceleration(), units::m()};
  const auto sol = solve_target(inputs, units::s());
  EXPECT_EQ(combine_dimensions(inputs, sol.particular), units::s());
}

}  // namespace
}  // namespace pasym
