// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "pasym/audit.hpp"
#include "pasym/blackbody.hpp"
#include "pasym/dynamics_model.hpp"
#include "pasym/exponent_solver.hpp"
#include "pasym/normalize.hpp"
#include "pasym/pendulum_experiment.hpp"
#include "pasym/units_model.hpp"

namespace {

using namespace pasym;
using Clock = std::chrono::steady_clock;

struct Criterion {
  std::string id;
  std::string description;
  std::function<void(std::vector<std::string>&)> body;  // push failure messages
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void expect(std::vector<std::string>& failures, bool ok, const std::string& what) {
  if (!ok) failures.push_back(what);
}

Dimension radiance_dim() { return units::kg() / units::m() / units::s().pow(3); }
Dimension boltzmann_dim() { return units::energy() / units::K(); }
Dimension planck_h_dim() { return units::kg() * units::m().pow(2) / units::s(); }

// Brute-force lattice oracle: integer tuples in [-3,3]^n reaching the target
// exactly, compared against the solver's affine lattice.
void brute_force_check(std::vector<std::string>& failures,
                       const std::vector<Dimension>& inputs, const Dimension& target,
                       const std::string& tag) {
  const int n = static_cast<int>(inputs.size());
  std::vector<std::vector<Rational>> brute;
  std::vector<int> e(n, -3);
  while (true) {
    std::vector<Rational> cand;
    for (int x : e) cand.emplace_back(x);
    if (combine_dimensions(inputs, cand) == target) brute.push_back(cand);
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
    expect(failures, brute.empty(), tag + ": solver infeasible but oracle found solutions");
    return;
  }
  expect(failures, combine_dimensions(inputs, sol.particular) == target,
         tag + ": particular does not reach target exactly");
  for (const auto& v : sol.nullspace)
    expect(failures, combine_dimensions(inputs, v).dimensionless(),
           tag + ": nullspace vector not dimensionless");
  // membership of each oracle solution in particular + span(nullspace) via
  // double least squares (independent of the rational elimination)
  for (const auto& b : brute) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = b[i].value() - sol.particular[i].value();
    const std::size_t k = sol.nullspace.size();
    std::vector<double> fitted(n, 0.0);
    if (k > 0) {
      linalg::Matrix a(n, std::vector<double>(k));
      for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) a[i][j] = sol.nullspace[j][i].value();
      const auto c = linalg::min_norm_least_squares(a, v);
      for (int i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) fitted[i] += a[i][j] * c[j];
    }
    for (int i = 0; i < n; ++i)
      expect(failures, std::abs(fitted[i] - v[i]) < 1e-9,
             tag + ": oracle solution outside the solver's lattice");
  }
}

// ---------------------------------------------------------------------------

void ac1(std::vector<std::string>& failures) {
  const std::vector<Dimension> inputs{units::kg(), units::acceleration(), units::m()};
  // warm up, then time the solve itself
  auto sol = solve_target(inputs, units::s());
  const auto t0 = Clock::now();
  constexpr int kReps = 100;
  for (int i = 0; i < kReps; ++i) sol = solve_target(inputs, units::s());
  const double per_call_ms = seconds_since(t0) * 1000.0 / kReps;
  expect(failures, sol.particular[0] == Rational(0), "mass exponent must be exactly 0");
  expect(failures, sol.particular[1] == Rational(-1, 2), "g exponent must be -1/2");
  expect(failures, sol.particular[2] == Rational(1, 2), "h exponent must be 1/2");
  expect(failures, sol.nullspace.empty(), "combination must be unique (empty nullspace)");
  expect(failures, per_call_ms < 1.0,
         "solve took " + std::to_string(per_call_ms) + " ms (>= 1 ms)");
}

void ac2(std::vector<std::string>& failures) {
  const std::vector<Dimension> inputs{units::kg(), units::acceleration(), units::velocity(),
                                      Dimension{}};
  const auto sol = solve_target(inputs, units::m());
  expect(failures,
         sol.particular == std::vector<Rational>{Rational(0), Rational(-1), Rational(2),
                                                 Rational(0)},
         "particular must be (0, -1, 2, 0)");
  bool theta_direction = sol.nullspace.size() == 1;
  if (theta_direction) {
    const auto d = primitive_integer_form(sol.nullspace[0]);
    theta_direction = d == std::vector<Rational>{0, 0, 0, 1};
  }
  expect(failures, theta_direction, "nullspace must be spanned by the theta direction");
}

void ac3(std::vector<std::string>& failures) {
  const std::vector<Dimension> pre{units::m(), units::K(), units::velocity(),
                                   boltzmann_dim()};
  const auto sol = solve_target(pre, radiance_dim());
  expect(failures,
         sol.particular == std::vector<Rational>{Rational(-4), Rational(1), Rational(1),
                                                 Rational(1)},
         "pre-Planck scaffold must be c k T / lambda^4");
  expect(failures, sol.nullspace.empty(), "pre-Planck Pi basis must be empty");

  std::vector<Dimension> with_h = pre;
  with_h.push_back(planck_h_dim());
  const auto basis = pi_basis(with_h);
  bool ok = basis.size() == 1;
  if (ok) {
    const auto b = primitive_integer_form(basis[0]);
    ok = (b == std::vector<Rational>{-1, -1, 1, -1, 1}) ||
         (b == std::vector<Rational>{1, 1, -1, 1, -1});
  }
  expect(failures, ok, "adding h must open exactly the h c/(lambda k T) direction");

  brute_force_check(failures, pre, radiance_dim(), "pre-Planck");
  brute_force_check(failures, with_h, radiance_dim(), "with-h");
}

void ac4(std::vector<std::string>& failures) {
  const auto t0 = Clock::now();
  BlackbodyConfig cfg;  // 5000 samples, 81-candidate lattice, desk scale
  TrainConfig train_cfg;
  train_cfg.seed = cfg.seed;  // the CLI couples these the same way
  const auto rep = run_blackbody_experiment(cfg, train_cfg);
  const double elapsed = seconds_since(t0);

  const Dimension want(std::array<Rational, kNumBaseUnits>{-1, -1, -1, -1});
  expect(failures, rep.search.dim == want,
         "selected constant dimension is " + rep.search.dim.to_string() +
             ", want kg^-1 m^-1 s^-1 K^-1");
  const PhysConstants consts;
  const double reference = consts.c.value * consts.k.value / (consts.h.value * consts.h.value);
  const double decades = std::abs(std::log10(rep.search.magnitude / reference));
  expect(failures, decades <= 1.0,
         "constant magnitude " + std::to_string(rep.search.magnitude) + " is " +
             std::to_string(decades) + " decades from c k h^-2");
  expect(failures,
         rep.mse_covariant_no_constant >= 10.0 * rep.mse_covariant_with_constant,
         "no-constant model must be >= 10x worse than the constant-aware model");
  expect(failures, rep.mse_covariant_with_constant < rep.mse_raw_mlp,
         "constant-aware model must beat the raw MLP");
  expect(failures, rep.search.table.size() == 80u, "score table must cover all 80 tuples");
  expect(failures, elapsed < 900.0,
         "experiment took " + std::to_string(elapsed) + " s (>= 15 min)");
  std::printf("        [blackbody: dim %s, magnitude %.3g, mse %g / %g / %g, %.0f s]\n",
              rep.search.dim.to_string().c_str(), rep.search.magnitude,
              rep.mse_covariant_no_constant, rep.mse_covariant_with_constant,
              rep.mse_raw_mlp, elapsed);
}

void ac5(std::vector<std::string>& failures) {
  const auto t0 = Clock::now();
  PendulumExperimentConfig cfg;  // N=500 train, T=5; test T=150
  TrainConfig train_cfg = pendulum_train_defaults();
  train_cfg.seed = cfg.seed;  // the CLI couples these the same way
  const auto rep = run_pendulum_experiment(cfg, train_cfg);
  const double elapsed = seconds_since(t0);

  expect(failures, rep.learned_g_angle_rad < 0.01,
         "learned-g angle " + std::to_string(rep.learned_g_angle_rad) + " rad (>= 0.01)");
  expect(failures, rep.learned_g.mean_relerr <= 2.0 * rep.known_g.mean_relerr,
         "learned-g mean State.RelErr " + std::to_string(rep.learned_g.mean_relerr) +
             " exceeds 2x known-g " + std::to_string(rep.known_g.mean_relerr));
  for (const auto* r : {&rep.known_g, &rep.no_g, &rep.learned_g})
    expect(failures, r->equivariance_deviation < 1e-10,
           "equivariance deviation " + std::to_string(r->equivariance_deviation) +
               " (>= 1e-10)");
  expect(failures, elapsed < 1800.0,
         "experiment took " + std::to_string(elapsed) + " s (>= 30 min)");
  std::printf(
      "        [pendulum: angle %.2e rad, relerr known %.3f / no %.3f / learned %.3f, "
      "%.0f s]\n",
      rep.learned_g_angle_rad, rep.known_g.mean_relerr, rep.no_g.mean_relerr,
      rep.learned_g.mean_relerr, elapsed);
}

// AC-6 property suites, each timed to stay under a minute.

void ac6a(std::vector<std::string>& failures) {
  const std::vector<Vec3> vectors{Vec3{0.4, -1.1, 0.9, units::m()},
                                  Vec3{2.0, 0.3, -0.7, units::m()},
                                  Vec3{-0.2, 0.8, 1.5, units::m()}};
  const auto base = gram_invariants(vectors);
  rng::Engine eng(1);
  Mat3 tc{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) tc[i][j] = eng.normal();
  const Tensor3 tensor{tc, units::s()};
  const double spec_base = spectral_norm(tensor).value;
  for (int t = 0; t < 32; ++t) {
    const auto r = haar_orthogonal(rng::derive_seed(6, {static_cast<std::uint64_t>(t)}));
    std::vector<Vec3> rot;
    for (const auto& v : vectors) rot.push_back(r.apply(v));
    const auto g = gram_invariants(rot);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        expect(failures,
               std::abs(g.at(i, j).value - base.at(i, j).value) <=
                   1e-10 * (1.0 + std::abs(base.at(i, j).value)),
               "gram invariance violated at 1e-10");
    expect(failures,
           std::abs(spectral_norm(r.conjugate(tensor)).value - spec_base) <=
               1e-10 * spec_base,
           "spectral norm invariance violated at 1e-10");
  }
}

void ac6b(std::vector<std::string>& failures) {
  // units covariance of planck_intensity and of a trained UnitsCovariantModel
  const PhysConstants consts;
  const Quantity lam{2.5e-6, units::m()}, temp{2000.0, units::K()};
  const double b0 = planck_intensity(lam, temp, consts).value;

  BlackbodyConfig bb;
  bb.samples = 400;
  bb.noise = 0.02;
  bb.seed = 99;
  const auto data = generate_blackbody(bb, consts);
  UnitsFitData fit;
  fit.names = {"lambda", "T", "c", "k"};
  fit.dims = {units::m(), units::K(), consts.c.dim, consts.k.dim};
  fit.values.assign(4, {});
  for (std::size_t i = 0; i < data.lambda.size(); ++i) {
    fit.values[0].push_back(data.lambda[i]);
    fit.values[1].push_back(data.temperature[i]);
    fit.values[2].push_back(consts.c.value);
    fit.values[3].push_back(consts.k.value);
    fit.target.push_back(data.intensity[i]);
  }
  fit.target_dim = radiance_dim();
  TrainConfig tc;
  tc.epochs = 200;
  tc.seed = 2;
  const auto model = fit_units_covariant(fit, planck_h_dim(), tc);

  rng::Engine eng(4242);
  for (int t = 0; t < 32; ++t) {
    UnitScaling s;
    for (int i = 0; i < kNumBaseUnits; ++i) s.scale[i] = std::exp(eng.uniform(-3.0, 3.0));
    const double moved =
        planck_intensity(rescale_quantity(lam, s), rescale_quantity(temp, s),
                         consts.rescaled(s))
            .value;
    expect(failures,
           std::abs(moved / s.factor(radiance_dim()) - b0) <= 1e-10 * b0,
           "planck units covariance violated at 1e-10");

    const std::vector<double> x{2.5e-6, 2000.0, consts.c.value, consts.k.value};
    const double base_pred = model.predict(x);
    std::vector<double> xs = x;
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] *= s.factor(fit.dims[i]);
    const double moved_pred = model.rescaled(s).predict(xs);
    expect(failures,
           std::abs(moved_pred - base_pred * s.factor(radiance_dim())) <=
               1e-10 * std::abs(base_pred * s.factor(radiance_dim())),
           "units-covariant model covariance violated at 1e-10");
  }
}

void ac6c(std::vector<std::string>& failures) {
  FeatureSchema schema{{
      {"pos", FeatureKind::kVector3, units::m()},
      {"mom", FeatureKind::kVector3, units::momentum()},
      {"T", FeatureKind::kScalar, units::K()},
  }};
  Dataset data;
  data.columns = schema.columns();
  rng::Engine eng(31);
  for (int r = 0; r < 48; ++r) {
    std::vector<double> row;
    for (int i = 0; i < 3; ++i) row.push_back(2.0 * eng.normal() + 0.5);
    for (int i = 0; i < 3; ++i) row.push_back(0.3 * eng.normal());
    row.push_back(250.0 + 30.0 * eng.normal());
    data.rows.push_back(row);
  }
  const auto base_applied = apply_normalizer(fit_normalizer(data, schema), data, schema);
  const auto idx = schema_column_indices(schema, data);

  for (int t = 0; t < 16; ++t) {
    // rotation commutation
    const auto r = haar_orthogonal(rng::derive_seed(88, {static_cast<std::uint64_t>(t)}));
    Dataset rotated = data;
    for (std::size_t row = 0; row < data.n_rows(); ++row) {
      const auto rec = row_to_record(schema, data, row, idx);
      std::vector<double> flat;
      for (const auto& f : rec) {
        const auto comps = record_components({rotate_feature(f, r)});
        flat.insert(flat.end(), comps.begin(), comps.end());
      }
      rotated.rows[row] = flat;
    }
    const auto lhs = apply_normalizer(fit_normalizer(rotated, schema), rotated, schema);
    for (std::size_t row = 0; row < data.n_rows(); ++row) {
      const auto rec = row_to_record(schema, base_applied, row,
                                     schema_column_indices(schema, base_applied));
      std::vector<double> want;
      for (const auto& f : rec) {
        const auto comps = record_components({rotate_feature(f, r)});
        want.insert(want.end(), comps.begin(), comps.end());
      }
      for (std::size_t c = 0; c < want.size(); ++c)
        expect(failures,
               std::abs(lhs.rows[row][c] - want[c]) <= 1e-10 * (1.0 + std::abs(want[c])),
               "normalizer rotation commutation violated at 1e-10");
    }

    // unit-change commutation
    UnitScaling s;
    rng::Engine seng(rng::derive_seed(89, {static_cast<std::uint64_t>(t)}));
    for (int i = 0; i < kNumBaseUnits; ++i) s.scale[i] = std::exp(seng.uniform(-3.0, 3.0));
    Dataset rescaled = data;
    std::size_t k = 0;
    for (const auto& f : schema.features()) {
      const double factor = s.factor(f.dim);
      for (int c = 0; c < f.column_count(); ++c)
        for (auto& row : rescaled.rows) row[idx[k + c]] *= factor;
      k += f.column_count();
    }
    const auto lhs2 = apply_normalizer(fit_normalizer(rescaled, schema), rescaled, schema);
    for (std::size_t row = 0; row < data.n_rows(); ++row)
      for (std::size_t c = 0; c < lhs2.columns.size(); ++c)
        expect(failures,
               std::abs(lhs2.rows[row][c] - base_applied.rows[row][c]) <=
                   1e-10 * (1.0 + std::abs(base_applied.rows[row][c])),
               "normalizer unit-change commutation violated at 1e-10");
  }
}

void ac6d(std::vector<std::string>& failures) {
  const PendulumParams p;
  rng::Engine eng(7);
  const auto s0 = sample_initial_state(p, 0.5, eng);
  // energy over the test horizon (150 labels x 0.1 s at dt = 1e-3)
  const double e0 = total_energy(s0, p);
  const auto traj = integrate(s0, p, 1e-3, 15000);
  double worst = 0.0;
  for (const auto& s : traj.states)
    worst = std::max(worst, std::abs(total_energy(s, p) - e0) / std::abs(e0));
  expect(failures, worst < 1e-6,
         "energy drift " + std::to_string(worst) + " over the test horizon (>= 1e-6)");

  // observed 4th order: halving dt cuts the endpoint error ~16x vs a dt/10
  // reference; 4e-3 vs 2e-3 keeps both errors above the roundoff floor
  const double horizon = 2.0;
  auto endpoint = [&](double dt) {
    return integrate(s0, p, dt, static_cast<int>(std::llround(horizon / dt))).states.back();
  };
  const auto ref = endpoint(2e-4);
  auto err = [&](double dt) {
    const auto e = endpoint(dt);
    const auto a = e.flat(), b = ref.flat();
    double acc = 0;
    for (int i = 0; i < 12; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
  };
  const double ratio = err(4e-3) / err(2e-3);
  expect(failures, ratio >= 12.0 && ratio <= 20.0,
         "dt-halving error ratio " + std::to_string(ratio) + " outside [12, 20]");
}

void ac6e(std::vector<std::string>& failures) {
  Mlp m = Mlp::init(4, 3, {12, 12}, Activation::kTanh, 15);
  const std::vector<double> x{0.2, -0.7, 1.1, 0.4};
  const std::vector<double> target{0.3, -0.1, 0.8};
  auto loss_of = [&](Mlp& net) {
    const auto out = net.predict(x);
    double s = 0;
    for (std::size_t k = 0; k < out.size(); ++k)
      s += (out[k] - target[k]) * (out[k] - target[k]);
    return s;
  };
  const auto trace = m.forward(x);
  std::vector<double> dout(3);
  for (int k = 0; k < 3; ++k) dout[k] = 2.0 * (trace.acts.back()[k] - target[k]);
  Mlp::Gradients g;
  g.zero_like(m);
  m.backward(trace, dout, g);
  std::vector<double> flat;
  for (std::size_t l = 0; l < g.w.size(); ++l) {
    flat.insert(flat.end(), g.w[l].begin(), g.w[l].end());
    flat.insert(flat.end(), g.b[l].begin(), g.b[l].end());
  }
  rng::Engine eng(123);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t i = eng.next_u64() % m.parameter_count();
    Mlp plus = m, minus = m;
    plus.parameter(i) += 1e-5;
    minus.parameter(i) -= 1e-5;
    const double fd = (loss_of(plus) - loss_of(minus)) / 2e-5;
    expect(failures, std::abs(flat[i] - fd) <= 1e-4 * std::max(1e-6, std::abs(fd)),
           "backprop/finite-difference mismatch beyond 1e-4 relative");
  }
}

void ac6f(std::vector<std::string>& failures) {
  brute_force_check(failures, {units::kg(), units::acceleration(), units::m()}, units::s(),
                    "free-fall");
  brute_force_check(failures,
                    {units::kg(), units::acceleration(), units::velocity(), Dimension{}},
                    units::m(), "projectile");
  brute_force_check(failures, {units::m(), units::m()}, units::m().pow(2), "areas");
  brute_force_check(failures, {units::kg(), units::s()}, units::K(), "infeasible");
  brute_force_check(failures,
                    {units::m(), units::K(), units::velocity(), boltzmann_dim(),
                     planck_h_dim()},
                    radiance_dim(), "planck");
}

void ac7(std::vector<std::string>& failures) {
  const std::string fixtures = PASYM_FIXTURES_DIR;
  const auto schema =
      FeatureSchema::from_json(load_json(fixtures + "/lint/schema.json"));
  for (int r = 1; r <= 7; ++r) {
    const std::string rule = "R" + std::to_string(r);
    const auto fail_diags = lint_pipeline(
        schema,
        PipelineDesc::from_json(load_json(fixtures + "/lint/r" + std::to_string(r) +
                                          "_fail.json")));
    bool fired = false;
    for (const auto& d : fail_diags) fired = fired || d.rule == rule;
    expect(failures, fired, rule + " did not fire on its failing fixture");
    const auto pass_diags = lint_pipeline(
        schema,
        PipelineDesc::from_json(load_json(fixtures + "/lint/r" + std::to_string(r) +
                                          "_pass.json")));
    expect(failures, pass_diags.empty(), rule + " fired on its passing fixture");
  }

  // covtest: construction-equivariant fixture passes, raw-component MLP fails
  FeatureSchema vschema{{{"v1", FeatureKind::kVector3, units::m()},
                         {"v2", FeatureKind::kVector3, units::m()}}};
  SchemaFn good = [](const Record& rec) {
    const Vec3& v1 = rec[0].vector();
    const Vec3& v2 = rec[1].vector();
    const auto g = gram_invariants({v1, v2});
    return GeomFeature{"out", equivariant_combination(
                                   {g.at(0, 1).value / g.at(1, 1).value,
                                    g.at(0, 0).value / g.at(1, 1).value},
                                   {v1, v2})};
  };
  CovarianceTestSpec spec;
  spec.trials = 32;
  spec.tolerance = 1e-8;
  const auto probes = generate_probes(vschema, spec.group, 4, 3);
  expect(failures, test_covariance(good, spec, probes).pass,
         "construction-equivariant fixture failed covtest");

  Json raw;
  raw["type"] = "raw_mlp";
  raw["mlp"] = Mlp::init(6, 3, {10}, Activation::kTanh, 8).to_json();
  raw["output"] = {{"kind", "vector3"}, {"dim", units::m().to_json()}};
  const auto bad = make_schema_function(raw, vschema);
  expect(failures, !test_covariance(bad.fn, spec, probes).pass,
         "raw-component MLP fixture passed covtest");

  // exit codes through the real binary
  auto exit_code_of = [](const std::string& args) {
    const std::string cmd = std::string(PASYM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  expect(failures,
         exit_code_of("dim solve --inputs m:kg g:m/s^2 h:m --target s") == 0,
         "feasible dim solve must exit 0");
  expect(failures, exit_code_of("dim solve --inputs m:kg --target K") == 2,
         "infeasible dim solve must exit 2");
  expect(failures, exit_code_of("dim solve") == 1, "usage error must exit 1");
  expect(failures,
         exit_code_of("audit lint --schema " + fixtures + "/lint/schema.json --pipeline " +
                      fixtures + "/lint/r1_fail.json") == 3,
         "lint with error diagnostics must exit nonzero (3)");
  expect(failures,
         exit_code_of("audit lint --schema " + fixtures + "/lint/schema.json --pipeline " +
                      fixtures + "/lint/r1_pass.json") == 0,
         "clean lint must exit 0");
}

}  // namespace

int main() {
  std::vector<Criterion> criteria{
      {"AC-1", "free-fall time: exponents (0, -1/2, 1/2), unique, < 1 ms", ac1},
      {"AC-2", "projectile range: (0, -1, 2, 0) with the theta nullspace direction", ac2},
      {"AC-3", "pre-Planck scaffold and the h c/(lambda k T) Pi direction", ac3},
      {"AC-4", "blackbody experiment: constant units/magnitude and model ordering", ac4},
      {"AC-5", "pendulum experiment: learned gravity and equivariance", ac5},
      {"AC-6a", "gram/spectral invariance under 32 rotations at 1e-10", ac6a},
      {"AC-6b", "units covariance of model and Planck law under 32 rescalings", ac6b},
      {"AC-6c", "normalizer rotation and unit-change commutation at 1e-10", ac6c},
      {"AC-6d", "RK4 energy conservation and 4th-order convergence", ac6d},
      {"AC-6e", "MLP backprop vs central finite differences at 1e-4", ac6e},
      {"AC-6f", "solver vs brute-force lattice oracle", ac6f},
      {"AC-7", "audit corpus: rules, covtest fixtures, exit codes", ac7},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    std::vector<std::string> failures;
    const auto t0 = Clock::now();
    try {
      c.body(failures);
    } catch (const std::exception& e) {
      failures.push_back(std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (c.id.rfind("AC-6", 0) == 0 && dt >= 60.0)
      failures.push_back("property suite took " + std::to_string(dt) + " s (>= 1 min)");
    if (failures.empty()) {
      std::printf("%-6s PASS  %s (%.2f s)\n", c.id.c_str(), c.description.c_str(), dt);
    } else {
      ++failed;
      std::printf("%-6s FAIL  %s (%.2f s)\n", c.id.c_str(), c.description.c_str(), dt);
      for (const auto& f : failures) std::printf("        - %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
