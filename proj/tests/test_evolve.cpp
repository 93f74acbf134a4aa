#include <doctest.h>

#include "nhqm/evolve.hpp"
#include "test_helpers.hpp"

using namespace nhqm;
using namespace nhqm::testing;

TEST_CASE("group: identity at t = 0 and -I at t = pi for deformed sigma_z") {
  auto [sx, sy, sz] = deformed_pauli(0.5);
  CHECK(op_norm(group(sz, 0.0) - CMat::Identity(2, 2)) < 1e-14);
  CHECK(op_norm(group(sz, M_PI) + CMat::Identity(2, 2)) < 1e-12);
  CHECK_THROWS_AS(group(CMat(Complex(0, 1) * pauli_z()), 1.0), Error);
}

TEST_CASE("group: norm bounded by the metric condition") {
  auto [sx, sy, sz] = deformed_pauli(0.8);
  auto sys = eig_general(sx);
  MetricOp g = metric_from_eigensystem(sys);
  double bound = op_norm(g.inv_sqrt) * op_norm(g.sqrt);
  for (double t : {-5.0, -1.1, 0.3, 2.7, 9.0})
    CHECK(op_norm(group(sys, t)) <= bound + 1e-9);
}

TEST_CASE("group law over a time range") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    CMat h = random_para_hermitian(3, rng);
    auto sys = eig_general(h);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double s = u(rng), t = u(rng);
    CMat us = group(sys, s), ut = group(sys, t);
    CHECK(op_norm(group(sys, s + t) - CMat(us * ut)) <=
          1e-10 * std::max(1.0, op_norm(us) * op_norm(ut)));
  }
}

TEST_CASE("stone_check: Hermitian and para-Hermitian generators") {
  StoneReport r1 = stone_check(pauli_z(), {0.1, 0.5, 1.0, 1.5, 2.0});
  CHECK(r1.group_law_defect <= 1e-12);
  CHECK(r1.max_norm_excess <= 1e-9);

  auto [sx, sy, sz] = deformed_pauli(0.5);
  StoneReport r2 = stone_check(sx, {0.1, 0.4, 0.9, 1.7, 2.0});
  CHECK(r2.group_law_defect <= 1e-10);
  CHECK(r2.max_norm_excess <= 1e-9);
  CHECK(r2.recovery_rate == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("stone_check: generator-recovery error tracks ||H^2||/2") {
  auto [sx, sy, sz] = deformed_pauli(0.4);
  StoneReport r = stone_check(sx, {0.5});
  CMat h2 = sx * sx;
  double half_norm = 0.5 * op_norm(h2);
  for (std::size_t i = 0; i < r.deltas.size(); ++i) {
    double ratio = r.generator_errors[i] / (r.deltas[i] * half_norm);
    CHECK(ratio == doctest::Approx(1.0).epsilon(0.05 + 10 * r.deltas[i]));
  }
}

TEST_CASE("propagator: constant generator matches the one-parameter group") {
  auto [sx, sy, sz] = deformed_pauli(0.6);
  auto sys = eig_general(sz);
  auto h = [&](double) { return sz; };
  Propagator p = make_propagator(h, 2.0, 400, 2);
  for (double t : {0.5, 1.0, 2.0})
    CHECK(op_norm(p.fwd(t) - group(sys, t)) < 1e-10);
}

TEST_CASE("propagator: minus deformed sigma_z reproduces the skew-projection form") {
  double w = 0.45, c = std::cos(w), s = std::sin(w);
  auto [sx, sy, sz] = deformed_pauli(w);
  auto h = [&](double) { return CMat(-sz); };
  Propagator p = make_propagator(h, 3.5, 700, 2);
  CVec ep(2), em(2), dp(2), dm(2);
  ep << Complex(1, 0), Complex(0, s / (1 + c));
  em << Complex(0, -s / (1 + c)), Complex(1, 0);
  dp << Complex((1 + c) / (2 * c), 0), Complex(0, -s / (2 * c));
  dm << Complex(0, s / (2 * c)), Complex((1 + c) / (2 * c), 0);
  for (double t : {0.8, 2.0, 3.14159}) {
    CMat disp = std::exp(Complex(0, t)) * ep * dp.adjoint() +
                std::exp(Complex(0, -t)) * em * dm.adjoint();
    CHECK(op_norm(p.fwd(t) - disp) < 1e-9);
    CMat disp_b = std::exp(Complex(0, -t)) * ep * dp.adjoint() +
                  std::exp(Complex(0, t)) * em * dm.adjoint();
    CHECK(op_norm(p.bwd(t) - disp_b) < 1e-9);
  }
}

TEST_CASE("propagator: commuting family integrates the coefficient") {
  auto f = [](double t) { return 1.0 + 0.5 * std::sin(3.0 * t); };
  auto h = [&](double t) { return CMat(f(t) * pauli_z()); };
  double tfin = 2.0;
  Propagator p = make_propagator(h, tfin, 2000, 2);
  // integral of f over [0, T] via fine Simpson
  int m = 20000;
  double acc = 0.0, dt = tfin / m;
  for (int k = 0; k < m; ++k)
    acc += dt / 6.0 * (f(k * dt) + 4.0 * f((k + 0.5) * dt) + f((k + 1) * dt));
  CMat expected = mat_exp(pauli_z(), Complex(0, -acc));
  CHECK(op_norm(p.fwd(tfin) - expected) < 1e-6);
}

TEST_CASE("propagator: composition and inversion defects stay at roundoff") {
  auto h = [](double t) {
    return CMat(pauli_z() + 0.7 * std::sin(1.3 * t) * pauli_x() +
                0.4 * std::cos(0.9 * t) * pauli_y());
  };
  Propagator p = make_propagator(h, 2.0, 128, 2);
  for (int i : {10, 50, 100}) {
    for (int j : {20, 90, 128}) {
      if (i > j) continue;
      CMat lhs = p.cum_fwd[j];
      CMat rhs = p.between(p.grid[j], p.grid[i]) * p.cum_fwd[i];
      CHECK(op_norm(lhs - rhs) < 1e-12);
    }
    CHECK(op_norm(CMat(p.cum_fwd[i] * p.cum_bwd[i]) - CMat::Identity(2, 2)) < 1e-12);
  }
}

TEST_CASE("propagator: order-2 and order-4 convergence against a fine reference") {
  auto h = [](double t) {
    return CMat(pauli_z() + 0.7 * std::sin(1.3 * t) * pauli_x() +
                0.4 * std::cos(0.9 * t) * pauli_y());
  };
  double tfin = 2.0;
  CMat ref = make_propagator(h, tfin, 16384, 4).cum_fwd.back();

  double e2a = op_norm(make_propagator(h, tfin, 64, 2).cum_fwd.back() - ref);
  double e2b = op_norm(make_propagator(h, tfin, 128, 2).cum_fwd.back() - ref);
  CHECK(e2a / e2b >= 3.5);

  double e4a = op_norm(make_propagator(h, tfin, 32, 4).cum_fwd.back() - ref);
  double e4b = op_norm(make_propagator(h, tfin, 64, 4).cum_fwd.back() - ref);
  CHECK(e4a / e4b >= 14.0);
}

TEST_CASE("propagator rejects generators with complex spectrum") {
  auto h = [](double t) { return CMat((1.0 + t) * Complex(0, 1) * pauli_z()); };
  CHECK_THROWS_AS(make_propagator(h, 1.0, 16, 2), Error);
}

TEST_CASE("evolve_state: eigenvector of a Hermitian generator only picks up phase") {
  auto sys = herm_eig(pauli_x());
  auto h = [&](double) { return pauli_x(); };
  Propagator p = make_propagator(h, 2.0, 256, 2);
  auto traj = evolve_state(p, sys.right.col(0));
  for (const auto& v : traj) CHECK(std::abs(v.norm() - 1.0) < 1e-10);
}

TEST_CASE("evolve_state: two-level closed form") {
  double r = 0.9, theta = -M_PI / 2, gamma = 1.0;
  auto tl = two_level_hamiltonian(r, theta, gamma);
  auto h = [&](double) { return tl.h; };
  Propagator p = make_propagator(h, 2.0, 2000, 2);
  CVec psi0(2);
  psi0 << Complex(1, 0), Complex(0, 0);
  auto traj = evolve_state(p, psi0);
  for (int k : {100, 700, 1500}) {
    double t = p.grid[k];
    Complex pref = std::exp(Complex(0, -r * t * std::cos(theta))) / std::cos(tl.phi);
    CVec expected(2);
    expected << pref * std::cos(0.5 * tl.omega_gap * t - tl.phi),
        pref * Complex(0, -1) * std::sin(0.5 * tl.omega_gap * t);
    CHECK((traj[k] - expected).norm() < 1e-8);
  }
}

TEST_CASE("evolve_state: para-unitary evolution does not preserve the norm") {
  auto [sx, sy, sz] = deformed_pauli(0.8);
  auto h = [&](double) { return sx; };
  Propagator p = make_propagator(h, 2.0, 2000, 2);
  CVec psi0(2);
  psi0 << Complex(1, 0), Complex(0, 0);
  auto traj = evolve_state(p, psi0);
  double dev = 0.0;
  for (const auto& v : traj) dev = std::max(dev, std::abs(v.norm() - 1.0));
  CHECK(dev > 1e-3);
}

TEST_CASE("similarity conservation: U(t) is unitary in the G inner product") {
  auto [sx, sy, sz] = deformed_pauli(0.7);
  auto sys = eig_general(sx);
  MetricOp g = metric_from_eigensystem(sys);
  for (double t : {0.3, 1.2, 4.5}) {
    CMat m = g.sqrt * group(sys, t) * g.inv_sqrt;
    CHECK(std::abs(op_norm(m) - 1.0) < 1e-9);
  }
}

TEST_CASE("brachistochrone: Hermitian case saturates the bound") {
  auto res = brachistochrone(0.0, 0.0, 1.0);
  CHECK(res.omega == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.phi == doctest::Approx(0.0));
  CHECK(res.t_transfer == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(std::abs(res.t_transfer - res.hermitian_bound) < 1e-9);
  CHECK(std::abs(res.t_simulated - res.t_transfer) < 1e-6);
}

TEST_CASE("brachistochrone: the r = 0.9 point beats the Hermitian bound") {
  auto res = brachistochrone(0.9, -M_PI / 2, 1.0);
  CHECK(res.t_transfer == doctest::Approx(1.0347264702353929).epsilon(1e-10));
  CHECK(std::abs(res.t_simulated - res.t_transfer) < 1e-6);
  CHECK(res.t_transfer < res.hermitian_bound);
}

TEST_CASE("brachistochrone: fixed-gap family drives the transfer time to zero") {
  // gamma^2 = 1 + r^2 keeps omega = 2 while phi -> -pi/2
  double prev = std::numeric_limits<double>::infinity();
  for (double r : {0.0, 2.0, 5.0, 20.0, 100.0}) {
    auto res = brachistochrone(r, -M_PI / 2, std::sqrt(1.0 + r * r));
    CHECK(res.omega == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(res.t_transfer < prev);
    CHECK(std::abs(res.t_simulated - res.t_transfer) < 1e-6);
    prev = res.t_transfer;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("brachistochrone: broken regime is rejected") {
  CHECK_THROWS_AS(brachistochrone(2.0, M_PI / 2, 1.0), Error);
}
