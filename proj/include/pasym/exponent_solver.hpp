#pragma once

#include <numeric>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/rational.hpp"

namespace pasym {

/// Solution of sum_i e_i * dim_i = target over the rationals: one particular
/// exponent assignment plus a basis of the nullspace (all independent
/// dimensionless power products of the inputs).
struct ExponentSolution {
  std::vector<Rational> particular;
  std::vector<std::vector<Rational>> nullspace;
};

namespace detail {

// Reduced row echelon form of the (base units x inputs) exponent matrix,
// optionally augmented with a target column. Pivots are chosen scanning
// columns left to right, so free variables fall on later inputs.
struct Rref {
  std::vector<std::vector<Rational>> m;  // rows x (n [+1])
  std::vector<int> pivot_col;            // per pivot row
  std::vector<int> col_pivot_row;        // per column, -1 if free
  int rows = 0, cols = 0;
};

inline Rref rref_exponent_matrix(const std::vector<Dimension>& inputs,
                                 const Dimension* target) {
  const int n = static_cast<int>(inputs.size());
  const int cols = n + (target ? 1 : 0);
  Rref r;
  r.rows = kNumBaseUnits;
  r.cols = cols;
  r.m.assign(kNumBaseUnits, std::vector<Rational>(cols));
  for (int u = 0; u < kNumBaseUnits; ++u) {
    for (int j = 0; j < n; ++j) r.m[u][j] = inputs[j][u];
    if (target) r.m[u][n] = (*target)[u];
  }
  r.col_pivot_row.assign(n, -1);
  int row = 0;
  for (int col = 0; col < n && row < r.rows; ++col) {
    int pivot = -1;
    for (int i = row; i < r.rows; ++i)
      if (!r.m[i][col].is_zero()) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(r.m[row], r.m[pivot]);
    const Rational inv = Rational(1) / r.m[row][col];
    for (int j = col; j < cols; ++j) r.m[row][j] *= inv;
    for (int i = 0; i < r.rows; ++i) {
      if (i == row || r.m[i][col].is_zero()) continue;
      const Rational f = r.m[i][col];
      for (int j = col; j < cols; ++j) r.m[i][j] -= f * r.m[row][j];
    }
    r.pivot_col.push_back(col);
    r.col_pivot_row[col] = row;
    ++row;
  }
  return r;
}

inline std::vector<std::vector<Rational>> nullspace_from_rref(const Rref& r, int n) {
  std::vector<std::vector<Rational>> basis;
  for (int col = 0; col < n; ++col) {
    if (r.col_pivot_row[col] >= 0) continue;  // pivot column
    std::vector<Rational> v(n);
    v[col] = Rational(1);
    for (std::size_t p = 0; p < r.pivot_col.size(); ++p)
      v[r.pivot_col[p]] = -r.m[p][col];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Solves sum_i e_i * dim_i = target by exact rational Gaussian elimination.
/// The particular solution sets all free (non-pivot) exponents to zero, which
/// with left-to-right pivoting prefers zero exponents on later inputs.
/// Throws InfeasibleError when the target is not in the rational span of the
/// inputs' dimensions.
inline ExponentSolution solve_target(const std::vector<Dimension>& inputs,
                                     const Dimension& target) {
  if (inputs.empty()) throw DomainError("solve_target: inputs must be nonempty");
  const int n = static_cast<int>(inputs.size());
  const auto r = detail::rref_exponent_matrix(inputs, &target);
  // consistency: a zero coefficient row with nonzero target entry is a
  // contradiction
  for (int i = 0; i < r.rows; ++i) {
    bool all_zero = true;
    for (int j = 0; j < n; ++j)
      if (!r.m[i][j].is_zero()) {
        all_zero = false;
        break;
      }
    if (all_zero && !r.m[i][n].is_zero())
      throw InfeasibleError("solve_target: target dimension not spanned by inputs");
  }
  ExponentSolution sol;
  sol.particular.assign(n, Rational(0));
  for (std::size_t p = 0; p < r.pivot_col.size(); ++p)
    sol.particular[r.pivot_col[p]] = r.m[p][n];
  sol.nullspace = detail::nullspace_from_rref(r, n);
  return sol;
}

/// Basis of all independent dimensionless power products of the inputs;
/// empty when only the trivial combination is dimensionless.
inline std::vector<std::vector<Rational>> pi_basis(const std::vector<Dimension>& inputs) {
  if (inputs.empty()) throw DomainError("pi_basis: inputs must be nonempty");
  const auto r = detail::rref_exponent_matrix(inputs, nullptr);
  return detail::nullspace_from_rref(r, static_cast<int>(inputs.size()));
}

/// Applies an exponent assignment to dimensions: returns sum_i e_i * dim_i.
inline Dimension combine_dimensions(const std::vector<Dimension>& inputs,
                                    const std::vector<Rational>& exponents) {
  Dimension d;
  for (std::size_t i = 0; i < inputs.size(); ++i) d = d * inputs[i].pow(exponents[i]);
  return d;
}

/// Scales a rational vector so entries are coprime integers and the first
/// nonzero entry is positive. Convenient canonical form for nullspace bases.
inline std::vector<Rational> primitive_integer_form(const std::vector<Rational>& v) {
  std::int64_t lcm = 1;
  for (const auto& r : v) lcm = std::lcm(lcm, r.den());
  std::vector<std::int64_t> ints;
  ints.reserve(v.size());
  for (const auto& r : v) ints.push_back(r.num() * (lcm / r.den()));
  std::int64_t g = 0;
  for (auto x : ints) g = std::gcd(g, std::abs(x));
  if (g == 0) g = 1;
  std::int64_t sign = 1;
  for (auto x : ints)
    if (x != 0) {
      sign = x > 0 ? 1 : -1;
      break;
    }
  std::vector<Rational> out;
  out.reserve(v.size());
  for (auto x : ints) out.emplace_back(sign * x / g);
  return out;
}

}  // namespace pasym
