#include <doctest.h>

#include "nhqm/geophase.hpp"
#include "test_helpers.hpp"

using namespace nhqm;
using namespace nhqm::testing;

namespace {

// spin observable with Bloch-angle-phi eigenframe (Example-5.2 style)
CMat bloch_observable(double phi) {
  return std::cos(phi) * pauli_z() + std::sin(phi) * pauli_x();
}

Complex beta1_closed(double w, double phi) {
  return Complex(M_PI * (1.0 + std::cos(phi) / std::cos(w)),
                 M_PI * std::sin(w) * std::sin(phi) / std::cos(w));
}

Complex beta2_closed(double w, double phi) {
  return Complex(M_PI * (1.0 - std::cos(phi) / std::cos(w)),
                 -M_PI * std::sin(w) * std::sin(phi) / std::cos(w));
}

std::function<CMat(double)> qubit_hamiltonian(double w) {
  CMat h = -std::get<2>(std::tuple(deformed_pauli(w)[0], deformed_pauli(w)[1],
                                   deformed_pauli(w)[2]));
  return [h](double) { return h; };
}

}  // namespace

TEST_CASE("heisenberg_evolve: commuting generator freezes the observable") {
  auto h = [](double) { return pauli_z(); };
  Propagator p = make_propagator(h, 1.0, 64, 2);
  CMat x0 = 2.0 * pauli_z() + CMat::Identity(2, 2);
  auto traj = heisenberg_evolve(x0, p);
  for (const auto& x : traj) CHECK(op_norm(x - x0) < 1e-12);
}

TEST_CASE("heisenberg_evolve: the spectrum is conserved along the flow") {
  std::mt19937_64 rng(83);
  CMat x0 = random_para_hermitian(3, rng);
  CMat hmat = random_para_hermitian(3, rng);
  auto h = [&](double) { return hmat; };
  Propagator p = make_propagator(h, 2.0, 512, 2);
  auto traj = heisenberg_evolve(x0, p);
  CVec s0 = eig_general(x0).eigenvalues;
  for (int k : {128, 300, 512}) {
    CVec st = eig_general(traj[k]).eigenvalues;
    for (int n = 0; n < 3; ++n)
      CHECK(std::abs(st(n) - s0(n)) < 1e-8 * std::max(1.0, std::abs(s0(n))));
  }
}

TEST_CASE("detect_cycle: the qubit example is pi-periodic") {
  double w = 0.3, phi = 0.7;
  auto h = qubit_hamiltonian(w);
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 8000, 2));
  auto traj = heisenberg_evolve(bloch_observable(phi), *p);
  auto c = detect_cycle(traj, p, 1e-3);
  CHECK(std::abs(c.tau - M_PI) < 1e-8);
  for (int n = 0; n < 2; ++n) {
    CHECK(std::abs(c.theta(n) - Complex(M_PI, 0)) < 1e-8);
  }
  // X(tau) returns to X0
  CMat xt = p->bwd(c.tau) * bloch_observable(phi) * p->fwd(c.tau);
  CHECK(op_norm(xt - bloch_observable(phi)) < 1e-8);
}

TEST_CASE("detect_cycle: zero Hamiltonian returns at the first grid point") {
  auto h = [](double) { return CMat(CMat::Zero(2, 2)); };
  auto p = std::make_shared<Propagator>(make_propagator(h, 1.0, 100, 2));
  auto traj = heisenberg_evolve(pauli_z(), *p);
  auto c = detect_cycle(traj, p, 1e-6);
  CHECK(c.tau == doctest::Approx(p->grid[1]).epsilon(1e-14));
  for (int n = 0; n < 2; ++n) CHECK(std::abs(c.theta(n)) < 1e-12);
}

TEST_CASE("detect_cycle: Hermitian limit of the qubit example") {
  auto h = [](double) { return CMat(-pauli_z()); };
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 8000, 2));
  auto traj = heisenberg_evolve(pauli_x(), *p);
  auto c = detect_cycle(traj, p, 1e-3);
  CHECK(std::abs(c.tau - M_PI) < 1e-8);
  for (int n = 0; n < 2; ++n) CHECK(std::abs(c.theta(n) - Complex(M_PI, 0)) < 1e-8);
}

TEST_CASE("detect_cycle: degenerate spectra and missing cycles are rejected") {
  auto h = qubit_hamiltonian(0.3);
  auto p = std::make_shared<Propagator>(make_propagator(h, 2.0, 2000, 2));
  auto traj_bad = heisenberg_evolve(CMat(CMat::Identity(2, 2)), *p);
  CHECK_THROWS_AS(detect_cycle(traj_bad, p, 1e-3), Error);

  auto traj = heisenberg_evolve(bloch_observable(0.7), *p);
  try {
    detect_cycle(traj, p, 1e-6);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoCycleFound);
  }
}

TEST_CASE("geometric_phases: closed forms of the qubit example") {
  for (auto [w, phi] : std::vector<std::pair<double, double>>{
           {0.3, 0.4}, {0.6, 0.9}, {-0.4, 2.5}, {0.55, -0.8}}) {
    auto h = qubit_hamiltonian(w);
    PhaseAnalysis pa = analyze_phases(h, bloch_observable(phi), 4.0, 12000, 2);
    CHECK(std::abs(pa.cycle.tau - M_PI) < 1e-8);
    // eigenvalue order: -1 (psi_2) first, +1 (psi_1) second
    CHECK(std::abs(pa.report.beta(1) - beta1_closed(w, phi)) < 1e-5);
    CHECK(std::abs(pa.report.beta(0) - beta2_closed(w, phi)) < 1e-5);
    for (int n = 0; n < 2; ++n) {
      Complex expected = std::exp(Complex(0, 1) * pa.report.beta(n));
      CHECK(std::abs(pa.report.holonomy_diag(n) - expected) < 1e-8);
    }
  }
}

TEST_CASE("geometric_phases: Hermitian limit gives real phases") {
  double phi = 0.8;
  auto h = [](double) { return CMat(-pauli_z()); };
  PhaseAnalysis pa = analyze_phases(h, bloch_observable(phi), 4.0, 8000, 2);
  CHECK(std::abs(pa.report.beta(1) - Complex(M_PI * (1 + std::cos(phi)), 0)) < 1e-6);
  for (int n = 0; n < 2; ++n) CHECK(std::abs(pa.report.beta(n).imag()) < 1e-9);
}

TEST_CASE("geometric_phases: invariance under a smooth time reparameterization") {
  double w = 0.4, phi = 0.6;
  auto h = qubit_hamiltonian(w);
  PhaseAnalysis base = analyze_phases(h, bloch_observable(phi), 4.0, 8000, 2);
  double tau = base.cycle.tau;

  auto s = [tau](double t) {
    return t < tau ? t + 0.12 * (tau / M_PI) * std::sin(M_PI * t / tau) : t;
  };
  auto sp = [tau](double t) { return t < tau ? 1.0 + 0.12 * std::cos(M_PI * t / tau) : 1.0; };
  auto h_rep = [&](double t) { return CMat(sp(t) * h(s(t))); };
  PhaseAnalysis rep = analyze_phases(h_rep, bloch_observable(phi), 4.0, 8000, 2);
  CHECK(multiset_phase_distance(base.report.beta, rep.report.beta) < 1e-6);
}

TEST_CASE("geometric_phases_loop: constant-slope gauge matches the closed form") {
  double w = 0.5, phi = 0.8;
  auto h = qubit_hamiltonian(w);
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 10000, 2));
  auto traj = heisenberg_evolve(bloch_observable(phi), *p);
  auto c = detect_cycle(traj, p, 1e-3);
  PhaseReport direct = geometric_phases(c, h);

  std::vector<std::function<Complex(double)>> alpha;
  for (int n = 0; n < 2; ++n) {
    Complex th = c.theta(n);
    double tau = c.tau;
    alpha.push_back([th, tau](double t) { return th * (t / tau); });
  }
  PhaseReport loop = geometric_phases_loop(c, alpha);
  double ds = c.tau / 20000 * 2.0;  // resample spacing upper bound
  for (int n = 0; n < 2; ++n)
    CHECK(std::abs(loop.beta(n) - direct.beta(n)) < 10 * ds * ds + 1e-6);

  // an extra 2pi winding shifts beta by 2pi and stays in the same class
  std::vector<std::function<Complex(double)>> alpha_wound;
  for (int n = 0; n < 2; ++n) {
    Complex th = c.theta(n) + Complex(2.0 * M_PI, 0);
    double tau = c.tau;
    alpha_wound.push_back([th, tau](double t) { return th * (t / tau); });
  }
  PhaseReport wound = geometric_phases_loop(c, alpha_wound);
  for (int n = 0; n < 2; ++n) {
    CHECK(std::abs(wound.beta(n) - direct.beta(n) - Complex(2.0 * M_PI, 0)) < 1e-5);
    CHECK(std::abs(fold_phase(wound.beta(n)) - fold_phase(direct.beta(n))) < 1e-5);
  }

  // a gauge that does not close is rejected
  std::vector<std::function<Complex(double)>> bad;
  for (int n = 0; n < 2; ++n) {
    double tau = c.tau;
    bad.push_back([tau](double t) { return Complex(0.37 * t / tau, 0); });
  }
  CHECK_THROWS_AS(geometric_phases_loop(c, bad), Error);
}

TEST_CASE("geometric_phases_loop: Hermitian limit stays real") {
  auto h = [](double) { return CMat(-pauli_z()); };
  PhaseAnalysis pa = analyze_phases(h, bloch_observable(0.9), 4.0, 8000, 2);
  std::vector<std::function<Complex(double)>> alpha;
  for (int n = 0; n < 2; ++n) {
    Complex th = pa.cycle.theta(n);
    double tau = pa.cycle.tau;
    alpha.push_back([th, tau](double t) { return th * (t / tau); });
  }
  PhaseReport loop = geometric_phases_loop(pa.cycle, alpha);
  for (int n = 0; n < 2; ++n) CHECK(std::abs(loop.beta(n).imag()) < 1e-7);
}

TEST_CASE("hausdorff_distance: set semantics and the sigma_z vs sigma_x oracle") {
  Decomposition oz = Decomposition::from_eigensystem(herm_eig(pauli_z()));
  CHECK(hausdorff_distance(oz, oz) == 0.0);

  CMat swapped(2, 2);
  swapped.col(0) = oz.frame.col(1);
  swapped.col(1) = oz.frame.col(0);
  CHECK(hausdorff_distance(oz, Decomposition::from_frame(swapped)) < 1e-15);

  Decomposition ox = Decomposition::from_eigensystem(herm_eig(pauli_x()));
  // enumeration oracle over both max-min terms
  double fwd = 0.0;
  for (const auto& a : oz.projectors) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : ox.projectors) best = std::min(best, op_norm(a - b));
    fwd = std::max(fwd, best);
  }
  double bwd = 0.0;
  for (const auto& b : ox.projectors) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : oz.projectors) best = std::min(best, op_norm(a - b));
    bwd = std::max(bwd, best);
  }
  double oracle = fwd + bwd;
  CHECK(hausdorff_distance(oz, ox) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("canonical_connection: diagonal extraction in the O0 frame") {
  std::mt19937_64 rng(89);
  Decomposition o0 = Decomposition::from_frame(random_cmat(3, rng));
  CMat ident = CMat::Identity(3, 3);

  CVec diag_coeffs = random_cvec(3, rng);
  CMat diag_q = o0.frame * diag_coeffs.asDiagonal() * o0.dual_frame.adjoint();
  CHECK(op_norm(canonical_connection(ident, diag_q, o0) - diag_q) < 1e-10);

  CMat off = CMat::Zero(3, 3);
  off += random_cvec(3, rng)(0) * o0.frame.col(0) * o0.dual_frame.col(1).adjoint();
  off += random_cvec(3, rng)(1) * o0.frame.col(2) * o0.dual_frame.col(0).adjoint();
  CHECK(op_norm(canonical_connection(ident, off, o0)) < 1e-10);

  CMat p = random_cmat(3, rng);
  CVec alpha = random_cvec(3, rng);
  CMat vertical = CMat::Zero(3, 3);
  for (int n = 0; n < 3; ++n)
    vertical += alpha(n) * (p * o0.frame.col(n)) * o0.dual_frame.col(n).adjoint();
  CMat expected = CMat::Zero(3, 3);
  for (int n = 0; n < 3; ++n)
    expected += alpha(n) * o0.frame.col(n) * o0.dual_frame.col(n).adjoint();
  CHECK(op_norm(canonical_connection(p, vertical, o0) - expected) < 1e-8);

  // the connection commutes with every projector of O0
  CMat q = random_cmat(3, rng);
  CMat om = canonical_connection(p, q, o0);
  for (const auto& proj : o0.projectors)
    CHECK(op_norm(CMat(om * proj) - CMat(proj * om)) < 1e-10);
}

TEST_CASE("canonical_connection: gauge equivariance") {
  std::mt19937_64 rng(97);
  Decomposition o0 = Decomposition::standard(3);
  for (int trial = 0; trial < 10; ++trial) {
    CMat p = random_cmat(3, rng);
    if (cond2(p) > 1e4) continue;
    CMat q = random_cmat(3, rng);
    GaugeElem g = GaugeElem::random_draw(3, rng);
    CMat gm = g.matrix(o0);
    CMat lhs = canonical_connection(p * gm, q * gm, o0);
    CMat rhs = gm.inverse() * canonical_connection(p, q, o0) * gm;
    CHECK(op_norm(lhs - rhs) < 1e-10 * std::max(1.0, op_norm(rhs)));
  }
}

TEST_CASE("horizontal_lift: constant and purely vertical paths") {
  auto h0 = [](double) { return CMat(CMat::Zero(2, 2)); };
  Propagator p0 = make_propagator(h0, 1.0, 32, 2);
  Decomposition o0 = Decomposition::standard(2);
  std::mt19937_64 rng(101);
  CMat v0 = random_cmat(2, rng);
  auto lift = horizontal_lift(p0, o0, v0, uniform_times(1.0, 64));
  for (const auto& v : lift) CHECK(op_norm(v - v0) < 1e-12);

  CMat hdiag(2, 2);
  hdiag << Complex(1.0, 0), Complex(0, 0), Complex(0, 0), Complex(-0.7, 0);
  auto hd = [&](double) { return hdiag; };
  Propagator pd = make_propagator(hd, 1.0, 256, 2);
  auto lift_d = horizontal_lift(pd, o0, CMat(CMat::Identity(2, 2)), uniform_times(1.0, 256));
  for (const auto& v : lift_d) CHECK(op_norm(v - CMat::Identity(2, 2)) < 1e-10);
}

TEST_CASE("horizontal_lift: the qubit example holonomy and both constructions") {
  double w = 0.3, phi = 0.7;
  auto h = qubit_hamiltonian(w);
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 8000, 2));
  auto traj = heisenberg_evolve(bloch_observable(phi), *p);
  auto c = detect_cycle(traj, p, 1e-3);

  Decomposition o0 = Decomposition::standard(2);
  CMat v0 = c.x0_system.right;
  auto ts = uniform_times(c.tau, 8192);
  auto closed = horizontal_lift(*p, o0, v0, ts);
  auto ode = horizontal_lift_ode(*p, o0, v0, ts);
  double gap = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k)
    gap = std::max(gap, op_norm(closed[k] - ode[k]));
  CHECK(gap < 1e-7);

  double defect = lift_connection_defect(closed, o0, c.tau / 8192);
  double dt = c.tau / 8192;
  double hnorm = op_norm(h(0.0));
  CHECK(defect <= 5.0 * dt * dt * hnorm * hnorm * hnorm + 1e-9);

  CMat hol = holonomy(closed, c, o0, v0);
  CVec phases = holonomy_phases(hol, v0, o0);
  CHECK(std::abs(phases(1) - std::exp(Complex(0, 1) * beta1_closed(w, phi))) < 1e-7);
  CHECK(std::abs(phases(0) - std::exp(Complex(0, 1) * beta2_closed(w, phi))) < 1e-7);

  // a truncated lift does not close
  auto half = horizontal_lift(*p, o0, v0, uniform_times(c.tau / 2, 512));
  CHECK_THROWS_AS(holonomy(half, c, o0, v0), Error);
}

TEST_CASE("holonomy: gauge-shifted starting points permute the phase multiset") {
  double w = 0.35, phi = 0.55;
  auto h = qubit_hamiltonian(w);
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 8000, 2));
  auto traj = heisenberg_evolve(bloch_observable(phi), *p);
  auto c = detect_cycle(traj, p, 1e-3);

  Decomposition o0 = Decomposition::standard(2);
  CMat v0 = c.x0_system.right;
  auto ts = uniform_times(c.tau, 4096);
  CVec base = holonomy_phases(holonomy(horizontal_lift(*p, o0, v0, ts), c, o0, v0), v0, o0);

  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 5; ++trial) {
    GaugeElem g = GaugeElem::random_draw(2, rng);
    CMat v0g = v0 * g.matrix(o0);
    CVec ph = holonomy_phases(holonomy(horizontal_lift(*p, o0, v0g, ts), c, o0, v0g), v0g, o0);
    CVec lb(2), lp(2);
    for (int n = 0; n < 2; ++n) {
      lb(n) = Complex(0, -1) * std::log(base(n));
      lp(n) = Complex(0, -1) * std::log(ph(n));
    }
    CHECK(multiset_phase_distance(lb, lp) < 1e-7);
  }
}

TEST_CASE("invariance_suite: the qubit example is invariant across all draws") {
  double w = 0.3, phi = 0.7;
  auto h = qubit_hamiltonian(w);
  PhaseAnalysis pa = analyze_phases(h, bloch_observable(phi), 4.0, 6000, 2);
  InvarianceReport rep = invariance_suite(pa.cycle, h, 3, 2024);
  CHECK(rep.reparam_deviation < 1e-6);
  CHECK(rep.gauge_deviation < 1e-6);
  CHECK(rep.measurement_deviation < 1e-6);
  // canonical connection at the transported measurement point coincides here
  CHECK(rep.canonical_new_o0_deviation < 1e-5);
}

TEST_CASE("decomposition invariants: idempotent, orthogonal, complete, rank one") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2 + static_cast<int>(rng() % 5);
    CMat v = random_cmat(d, rng);
    if (cond2(v) > 1e4) continue;
    Decomposition o = Decomposition::from_frame(v);
    CMat sum = CMat::Zero(d, d);
    for (int n = 0; n < d; ++n) {
      const CMat& p = o.projectors[n];
      CHECK(op_norm(CMat(p * p) - p) < 1e-10);
      CHECK(std::abs(p.trace() - Complex(1, 0)) < 1e-10);
      for (int m = 0; m < n; ++m)
        CHECK(op_norm(CMat(p * o.projectors[m])) < 1e-10);
      sum += p;
    }
    CHECK(op_norm(sum - CMat::Identity(d, d)) < 1e-10);
  }
}

TEST_CASE("geometry error paths: dimension, singular frame, fiber") {
  Decomposition o2 = Decomposition::standard(2);
  Decomposition o3 = Decomposition::standard(3);
  CHECK_THROWS_AS(hausdorff_distance(o2, o3), Error);

  CMat sing(2, 2);
  sing << Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(1, 0);
  CHECK_THROWS_AS(canonical_connection(sing, CMat::Identity(2, 2), o2), Error);

  auto h = qubit_hamiltonian(0.3);
  auto p = std::make_shared<Propagator>(make_propagator(h, 4.0, 4000, 2));
  auto traj = heisenberg_evolve(bloch_observable(0.7), *p);
  auto c = detect_cycle(traj, p, 1e-3);
  Decomposition o0 = Decomposition::standard(2);
  CMat wrong_v0(2, 2);
  wrong_v0 << Complex(1, 0), Complex(0.3, 0.1), Complex(0, 0), Complex(1, 0);
  auto ts = uniform_times(c.tau, 512);
  auto lift = horizontal_lift(*p, o0, wrong_v0, ts);
  try {
    holonomy(lift, c, o0, wrong_v0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotInFiber);
  }
}

TEST_CASE("three-level pipeline: integer-gap generator cycles at 2 pi") {
  // non-orthogonal eigenframe with eigenvalues {0, 1, 2}: U(0, 2pi) = I
  std::mt19937_64 rng(131);
  CMat v = random_cmat(3, rng);
  while (cond2(v) > 50.0) v = random_cmat(3, rng);
  CVec lam(3);
  lam << Complex(0, 0), Complex(1, 0), Complex(2, 0);
  CMat hm = v * lam.asDiagonal() * v.inverse();
  auto h = [hm](double) { return hm; };

  CMat x0 = random_para_hermitian(3, rng);
  PhaseAnalysis pa = analyze_phases(h, x0, 8.0, 12000, 2);
  CHECK(std::abs(pa.cycle.tau - 2 * M_PI) < 1e-7);
  for (int n = 0; n < 3; ++n) {
    CHECK(std::abs(pa.cycle.theta(n)) < 1e-7);  // U(0, tau) = I
    CHECK(std::abs(pa.report.holonomy_diag(n) -
                   std::exp(Complex(0, 1) * pa.report.beta(n))) < 1e-7);
  }
  // loop form agrees
  std::vector<std::function<Complex(double)>> alpha;
  for (int n = 0; n < 3; ++n) {
    Complex th = pa.cycle.theta(n);
    double tau = pa.cycle.tau;
    alpha.push_back([th, tau](double t) { return th * (t / tau); });
  }
  PhaseReport loop = geometric_phases_loop(pa.cycle, alpha);
  for (int n = 0; n < 3; ++n)
    CHECK(std::abs(loop.beta(n) - pa.report.beta(n)) < 2e-5);
  // invariance across a gauge draw and a measurement draw
  InvarianceReport inv = invariance_suite(pa.cycle, h, 2, 555);
  CHECK(inv.gauge_deviation < 1e-6);
  CHECK(inv.measurement_deviation < 1e-5);
}
