#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "pasym/dimension.hpp"
#include "pasym/errors.hpp"
#include "pasym/geometry.hpp"
#include "pasym/random.hpp"

namespace pasym {

namespace vec {
inline Arr3 add(const Arr3& a, const Arr3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Arr3 sub(const Arr3& a, const Arr3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Arr3 scale(double k, const Arr3& a) { return {k * a[0], k * a[1], k * a[2]}; }
inline double dot(const Arr3& a, const Arr3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Arr3& a) { return std::sqrt(dot(a, a)); }
}  // namespace vec

/// Springy double pendulum: pivot at q0, two masses joined by springs, in a
/// uniform gravity field g. Defaults are the unit parameters with g=(0,0,-1).
struct PendulumParams {
  double m1 = 1.0, m2 = 1.0;  // kg
  double k1 = 1.0, k2 = 1.0;  // kg s^-2
  double l1 = 1.0, l2 = 1.0;  // m
  Arr3 q0{0.0, 0.0, 0.0};     // m
  Arr3 g{0.0, 0.0, -1.0};     // m s^-2

  void validate() const {
    if (!(m1 > 0 && m2 > 0 && k1 > 0 && k2 > 0 && l1 > 0 && l2 > 0))
      throw DomainError("PendulumParams: masses, spring constants, lengths must be positive");
  }

  /// Static equilibrium hanging along -g: spring 1 supports both masses,
  /// spring 2 supports mass 2.
  std::pair<Arr3, Arr3> equilibrium() const {
    const double gmag = vec::norm(g);
    const Arr3 down = vec::scale(1.0 / gmag, g);
    const double s1 = l1 + (m1 + m2) * gmag / k1;
    const double s2 = l2 + m2 * gmag / k2;
    const Arr3 q1 = vec::add(q0, vec::scale(s1, down));
    const Arr3 q2 = vec::add(q1, vec::scale(s2, down));
    return {q1, q2};
  }
};

/// z = (q1, q2, p1, p2); positions in m, momenta in kg m/s.
struct PendulumState {
  Arr3 q1{}, q2{}, p1{}, p2{};

  std::array<double, 12> flat() const {
    return {q1[0], q1[1], q1[2], q2[0], q2[1], q2[2],
            p1[0], p1[1], p1[2], p2[0], p2[1], p2[2]};
  }
};

inline PendulumState rotate_state(const PendulumState& s, const Orthogonal3& r) {
  return {r.apply(s.q1), r.apply(s.q2), r.apply(s.p1), r.apply(s.p2)};
}

struct Trajectory {
  std::vector<double> times;          // s, strictly increasing
  std::vector<PendulumState> states;  // same length
};

/// Kinetic and potential energy, both in kg m^2 s^-2.
inline std::pair<Quantity, Quantity> energies(const PendulumState& s, const PendulumParams& p) {
  const double ke = vec::dot(s.p1, s.p1) / (2.0 * p.m1) + vec::dot(s.p2, s.p2) / (2.0 * p.m2);
  const Arr3 d1 = vec::sub(s.q1, p.q0);
  const Arr3 d2 = vec::sub(s.q2, s.q1);
  const double stretch1 = vec::norm(d1) - p.l1;
  const double stretch2 = vec::norm(d2) - p.l2;
  const double pe = 0.5 * p.k1 * stretch1 * stretch1 + 0.5 * p.k2 * stretch2 * stretch2 -
                    p.m1 * vec::dot(p.g, d1) - p.m2 * vec::dot(p.g, vec::sub(s.q2, p.q0));
  return {Quantity{ke, units::energy()}, Quantity{pe, units::energy()}};
}

inline double total_energy(const PendulumState& s, const PendulumParams& p) {
  const auto [ke, pe] = energies(s, p);
  return ke.value + pe.value;
}

/// Hamilton's equations for the energies above:
///   qdot_i = p_i / m_i
///   pdot_1 = -k1 (|q1-q0|-l1) u1 + k2 (|q2-q1|-l2) u2 + m1 g
///   pdot_2 = -k2 (|q2-q1|-l2) u2 + m2 g
/// with u1, u2 the unit separation vectors. Throws SingularityError when
/// points coincide (separation below 1e-12).
inline PendulumState dynamics_rhs(const PendulumState& s, const PendulumParams& p) {
  const Arr3 d1 = vec::sub(s.q1, p.q0);
  const Arr3 d2 = vec::sub(s.q2, s.q1);
  const double n1 = vec::norm(d1);
  const double n2 = vec::norm(d2);
  if (n1 < 1e-12 || n2 < 1e-12)
    throw SingularityError("dynamics_rhs: coincident points");
  const Arr3 u1 = vec::scale(1.0 / n1, d1);
  const Arr3 u2 = vec::scale(1.0 / n2, d2);
  const double f1 = p.k1 * (n1 - p.l1);
  const double f2 = p.k2 * (n2 - p.l2);
  PendulumState d;
  d.q1 = vec::scale(1.0 / p.m1, s.p1);
  d.q2 = vec::scale(1.0 / p.m2, s.p2);
  d.p1 = vec::add(vec::add(vec::scale(-f1, u1), vec::scale(f2, u2)), vec::scale(p.m1, p.g));
  d.p2 = vec::add(vec::scale(-f2, u2), vec::scale(p.m2, p.g));
  return d;
}

namespace detail {
inline PendulumState axpy(const PendulumState& s, double h, const PendulumState& d) {
  PendulumState r;
  r.q1 = vec::add(s.q1, vec::scale(h, d.q1));
  r.q2 = vec::add(s.q2, vec::scale(h, d.q2));
  r.p1 = vec::add(s.p1, vec::scale(h, d.p1));
  r.p2 = vec::add(s.p2, vec::scale(h, d.p2));
  return r;
}
}  // namespace detail

inline PendulumState rk4_step(const PendulumState& s, const PendulumParams& p, double dt) {
  const PendulumState k1 = dynamics_rhs(s, p);
  const PendulumState k2 = dynamics_rhs(detail::axpy(s, dt / 2.0, k1), p);
  const PendulumState k3 = dynamics_rhs(detail::axpy(s, dt / 2.0, k2), p);
  const PendulumState k4 = dynamics_rhs(detail::axpy(s, dt, k3), p);
  PendulumState out = s;
  const double w = dt / 6.0;
  auto comb = [&](Arr3 PendulumState::*f) {
    for (int i = 0; i < 3; ++i)
      (out.*f)[i] = (s.*f)[i] + w * ((k1.*f)[i] + 2.0 * (k2.*f)[i] + 2.0 * (k3.*f)[i] + (k4.*f)[i]);
  };
  comb(&PendulumState::q1);
  comb(&PendulumState::q2);
  comb(&PendulumState::p1);
  comb(&PendulumState::p2);
  return out;
}

/// Classical fixed-step RK4. Returns n_steps+1 states including the start.
inline Trajectory integrate(const PendulumState& s0, const PendulumParams& p, double dt,
                            int n_steps) {
  if (!(dt > 0.0)) throw DomainError("integrate: dt must be positive");
  Trajectory t;
  t.times.reserve(n_steps + 1);
  t.states.reserve(n_steps + 1);
  t.times.push_back(0.0);
  t.states.push_back(s0);
  PendulumState cur = s0;
  for (int i = 1; i <= n_steps; ++i) {
    cur = rk4_step(cur, p, dt);
    t.times.push_back(i * dt);
    t.states.push_back(cur);
  }
  return t;
}

/// ||pred - truth|| / (||pred|| + ||truth||) over the 12 concatenated
/// components; in [0, 1].
inline double state_rel_err(const PendulumState& pred, const PendulumState& truth) {
  const auto a = pred.flat();
  const auto b = truth.flat();
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < 12; ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double denom = std::sqrt(na) + std::sqrt(nb);
  if (denom == 0.0) return 0.0;
  return std::sqrt(diff) / denom;
}

/// One sample: an initial state and its labels at later times, all on the
/// sample's own integrated trajectory.
struct PendulumSample {
  PendulumState z0;
  std::vector<double> label_times;        // Delta t from z0
  std::vector<PendulumState> label_states;
};

struct PendulumDataset {
  std::vector<PendulumSample> samples;
  PendulumParams params;
};

/// Initial states near the hanging equilibrium: positions displaced within a
/// uniform ball of the given radius, momenta within a ball of the same radius
/// in momentum units. Keeps springs taut and clear of the singularity guard.
inline PendulumState sample_initial_state(const PendulumParams& p, double radius,
                                          rng::Engine& eng) {
  const auto [eq1, eq2] = p.equilibrium();
  PendulumState s;
  s.q1 = vec::add(eq1, eng.in_ball(radius));
  s.q2 = vec::add(eq2, eng.in_ball(radius));
  s.p1 = eng.in_ball(radius);
  s.p2 = eng.in_ball(radius);
  return s;
}

/// N initializations with labels at label_count later times spaced
/// label_spacing apart, integrated at the given dt. Per-sample seeds derive
/// from (seed, sample index).
inline PendulumDataset generate_dataset(int n, int label_count, std::uint64_t seed,
                                        const PendulumParams& p, double label_spacing = 0.1,
                                        double dt = 1e-3, double init_radius = 0.5) {
  if (n < 1) throw DomainError("generate_dataset: n >= 1");
  if (label_count < 1) throw DomainError("generate_dataset: label_count >= 1");
  p.validate();
  PendulumDataset ds;
  ds.params = p;
  const int steps_per_label = static_cast<int>(std::llround(label_spacing / dt));
  if (steps_per_label < 1) throw DomainError("generate_dataset: label_spacing < dt");
  for (int i = 0; i < n; ++i) {
    rng::Engine eng(rng::derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    PendulumSample sample;
    sample.z0 = sample_initial_state(p, init_radius, eng);
    PendulumState cur = sample.z0;
    for (int t = 1; t <= label_count; ++t) {
      for (int k = 0; k < steps_per_label; ++k) cur = rk4_step(cur, p, dt);
      sample.label_times.push_back(t * label_spacing);
      sample.label_states.push_back(cur);
    }
    ds.samples.push_back(std::move(sample));
  }
  return ds;
}

}  // namespace pasym
