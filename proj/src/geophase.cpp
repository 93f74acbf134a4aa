#include "nhqm/geophase.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace nhqm {

namespace {

Complex simpson_rec(const std::function<Complex(double)>& f, double a, double b, Complex fa,
                    Complex fm, Complex fb, Complex whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  Complex flm = f(lm), frm = f(rm);
  Complex left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  Complex right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  Complex both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= 15.0 * tol)
    return both + (both - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b,
                         double tol) {
  if (a == b) return Complex(0, 0);
  Complex fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  Complex whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 28);
}

double wrapped_abs(double x) {
  x = std::fmod(std::fabs(x), 2.0 * M_PI);
  return std::min(x, 2.0 * M_PI - x);
}

}  // namespace

Decomposition Decomposition::from_frame(const CMat& v) {
  Decomposition d;
  d.frame = v;
  d.dual_frame = dual_basis(v);
  const int n = static_cast<int>(v.rows());
  d.projectors.reserve(n);
  for (int k = 0; k < n; ++k)
    d.projectors.push_back(d.frame.col(k) * d.dual_frame.col(k).adjoint());
  return d;
}

Decomposition Decomposition::from_eigensystem(const EigSystem& sys) {
  Decomposition d;
  d.frame = sys.right;
  d.dual_frame = sys.left;
  d.projectors.reserve(sys.dim());
  for (int k = 0; k < sys.dim(); ++k)
    d.projectors.push_back(sys.right.col(k) * sys.left.col(k).adjoint());
  return d;
}

Decomposition Decomposition::standard(int d) { return from_frame(CMat::Identity(d, d)); }

double hausdorff_distance(const Decomposition& o1, const Decomposition& o2) {
  if (o1.dim() != o2.dim())
    fail(Errc::DimensionMismatch, "hausdorff_distance: dimension mismatch");
  const int n = static_cast<int>(o1.projectors.size());
  const int m = static_cast<int>(o2.projectors.size());
  Eigen::MatrixXd dist(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      dist(i, j) = op_norm(o1.projectors[i] - o2.projectors[j]);
  double fwd = 0.0, bwd = 0.0;
  for (int i = 0; i < n; ++i) fwd = std::max(fwd, dist.row(i).minCoeff());
  for (int j = 0; j < m; ++j) bwd = std::max(bwd, dist.col(j).minCoeff());
  return fwd + bwd;
}

CMat GaugeElem::matrix(const Decomposition& o0) const {
  const int d = o0.dim();
  CMat g = CMat::Zero(d, d);
  for (int n = 0; n < d; ++n)
    g += scalars(n) * o0.frame.col(perm[n]) * o0.dual_frame.col(n).adjoint();
  return g;
}

GaugeElem GaugeElem::random_draw(int d, std::mt19937_64& rng) {
  GaugeElem g;
  g.perm.resize(d);
  std::iota(g.perm.begin(), g.perm.end(), 0);
  std::shuffle(g.perm.begin(), g.perm.end(), rng);
  g.scalars.resize(d);
  std::uniform_real_distribution<double> mod(0.5, 2.0), ph(-M_PI, M_PI);
  for (int n = 0; n < d; ++n) g.scalars(n) = std::polar(mod(rng), ph(rng));
  return g;
}

std::vector<CMat> heisenberg_evolve(const CMat& x0, const Propagator& p) {
  para_hermitian_eigensystem(x0);
  std::vector<CMat> out;
  out.reserve(p.cum_fwd.size());
  for (std::size_t k = 0; k < p.cum_fwd.size(); ++k)
    out.push_back(p.cum_bwd[k] * x0 * p.cum_fwd[k]);
  return out;
}

CyclicEvolution detect_cycle(const std::vector<CMat>& x_traj,
                             std::shared_ptr<const Propagator> p, double tol) {
  if (!p) fail(Errc::DomainError, "detect_cycle: null propagator");
  if (tol <= 0.0) fail(Errc::DomainError, "detect_cycle: tol must be positive");
  if (x_traj.size() != p->cum_fwd.size())
    fail(Errc::DimensionMismatch, "detect_cycle: trajectory does not match the grid");

  CyclicEvolution c;
  c.prop = p;
  c.x0_system = para_hermitian_eigensystem(x_traj.front());
  const int d = c.x0_system.dim();

  double spread = 0.0, gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double dij = std::abs(c.x0_system.eigenvalues(i) - c.x0_system.eigenvalues(j));
      spread = std::max(spread, dij);
      gap = std::min(gap, dij);
    }
  if (d > 1 && gap <= 1e-6 * spread)
    fail(Errc::DegenerateSpectrum, "detect_cycle: eigenvalue gap below the gate",
         {{"gap", gap}, {"spread", spread}});

  Decomposition d0 = Decomposition::from_eigensystem(c.x0_system);
  const CMat& x0 = x_traj.front();

  auto traj_decomp = [&](const CMat& x) {
    return Decomposition::from_eigensystem(para_hermitian_eigensystem(x));
  };
  auto dist_at = [&](double t) {
    CMat xt = p->bwd(t) * x0 * p->fwd(t);
    return hausdorff_distance(traj_decomp(xt), d0);
  };

  const std::size_t last = x_traj.size() - 1;
  std::vector<double> dists(x_traj.size(), 0.0);
  for (std::size_t k = 1; k < x_traj.size(); ++k)
    dists[k] = hausdorff_distance(traj_decomp(x_traj[k]), d0);

  auto refine = [&](std::size_t k) {
    // golden-section minimum of the distance around the grid hit
    double a = p->grid[k - 1];
    double b = p->grid[std::min(k + 1, last)];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = dist_at(x1), f2 = dist_at(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, b); ++it) {
      if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - gr * (b - a); f1 = dist_at(x1); }
      else         { a = x1; x1 = x2; f1 = f2; x2 = a + gr * (b - a); f2 = dist_at(x2); }
    }
    double t = 0.5 * (a + b);
    return std::pair<double, double>(t, dist_at(t));
  };

  // A decomposition return is only a cycle of the observable when U(0,tau)
  // closes every eigenvector on itself (a permuted return is X(tau) != X0).
  const double close_gate = std::max(100.0 * tol, 1e-6);
  auto try_close = [&](double tau_cand) -> bool {
    CMat u0tau = p->bwd(tau_cand);
    double scale = std::max(1.0, op_norm(u0tau));
    CVec theta(d), mus(d);
    double defect = 0.0;
    for (int n = 0; n < d; ++n) {
      CVec en = c.x0_system.right.col(n);
      CVec img = u0tau * en;
      Complex mu = c.x0_system.left.col(n).dot(img);
      defect = std::max(defect, (img - mu * en).norm() / scale);
      mus(n) = mu;
      Complex th = Complex(0, -1) * std::log(mu);
      // principal branch Re in (-pi, pi]: values rounded just below the cut
      // belong to +pi
      if (th.real() <= -M_PI + 1e-9) th += Complex(2.0 * M_PI, 0);
      theta(n) = th;
    }
    if (defect > close_gate) return false;
    c.tau = tau_cand;
    c.theta = theta;
    c.cycle_defect = defect;
    c.windings.assign(d, 0);
    for (int n = 0; n < d; ++n) {
      // continuity-tracked winding of arg <psi*_n(0), psi_n(t)> along the grid
      CVec en = c.x0_system.right.col(n);
      CVec dn = c.x0_system.left.col(n);
      double acc = 0.0, prev = 0.0;
      bool first = true;
      auto push = [&](Complex overlap) {
        double a = std::arg(overlap);
        if (!first) {
          double step = a - prev;
          while (step > M_PI) step -= 2.0 * M_PI;
          while (step < -M_PI) step += 2.0 * M_PI;
          acc += step;
        }
        first = false;
        prev = a;
      };
      for (std::size_t k = 0; k < p->cum_bwd.size() && p->grid[k] <= tau_cand; ++k)
        push(dn.dot(p->cum_bwd[k] * en));
      push(mus(n));
      c.windings[n] = static_cast<int>(std::llround((acc - c.theta(n).real()) / (2.0 * M_PI)));
    }
    return true;
  };

  // A return is a local minimum of the distance once the trajectory has left
  // the start; a distance at the numerical floor counts immediately, which
  // also covers stationary trajectories (first grid point, by convention).
  const double escape = std::max(10.0 * tol, 1e-9);
  double seen_max = 0.0;
  bool closed = false;
  for (std::size_t k = 1; k < x_traj.size() && !closed; ++k) {
    seen_max = std::max(seen_max, dists[k]);
    if (dists[k] <= 1e-12) {
      closed = try_close(p->grid[k]);
      continue;
    }
    bool local_min = (dists[k] <= dists[k - 1]) &&
                     (k == last || dists[k] <= dists[k + 1]);
    if (!local_min || seen_max < escape) continue;
    auto [t_ref, d_ref] = refine(k);
    if (d_ref <= tol) closed = try_close(t_ref);
  }
  if (!closed)
    fail(Errc::NoCycleFound, "detect_cycle: no return within the trajectory horizon",
         {{"tol", tol}, {"min_distance", *std::min_element(dists.begin() + 1, dists.end())}});
  return c;
}

std::vector<double> uniform_times(double t_end, int samples) {
  std::vector<double> ts(samples + 1);
  for (int j = 0; j <= samples; ++j) ts[j] = t_end * j / samples;
  return ts;
}

namespace {

int cycle_samples(const CyclicEvolution& c) {
  int by_grid = static_cast<int>(std::ceil(c.tau / c.prop->dt));
  return std::clamp(by_grid, 1024, 20000);
}

}  // namespace

PhaseReport geometric_phases(const CyclicEvolution& c, const std::function<CMat(double)>& h) {
  const int d = c.x0_system.dim();
  PhaseReport rep;
  rep.tau = c.tau;
  rep.theta = c.theta;
  rep.branch_windings = c.windings;
  rep.dynamical.resize(d);
  rep.beta.resize(d);

  for (int n = 0; n < d; ++n) {
    CVec en = c.x0_system.right.col(n);
    CVec dn = c.x0_system.left.col(n);
    auto f = [&](double t) { return Complex(dn.dot(h(t) * en)); };
    rep.dynamical(n) = adaptive_simpson(f, 0.0, c.tau, 1e-9);
    rep.beta(n) = c.theta(n) - rep.dynamical(n);
  }

  // holonomy diagonal from the horizontal lift of the eigenframe path
  Decomposition o0 = Decomposition::standard(d);
  CMat v0 = c.x0_system.right;
  auto ts = uniform_times(c.tau, cycle_samples(c));
  auto lift = horizontal_lift(*c.prop, o0, v0, ts);
  CMat hol = holonomy(lift, c, o0, v0, std::max(1e-6, 100.0 * c.cycle_defect));
  rep.holonomy_diag = holonomy_phases(hol, v0, o0);
  return rep;
}

PhaseReport geometric_phases_loop(const CyclicEvolution& c,
                                  const std::vector<std::function<Complex(double)>>& alpha) {
  const int d = c.x0_system.dim();
  if (static_cast<int>(alpha.size()) != d)
    fail(Errc::DimensionMismatch, "geometric_phases_loop: one alpha_n per eigenstate required");
  for (int n = 0; n < d; ++n) {
    // closure of e^{-i alpha_n} psi_n requires alpha_n(tau) - alpha_n(0) to
    // equal theta_n up to an integer number of 2pi windings
    Complex delta = alpha[n](c.tau) - alpha[n](0.0) - c.theta(n);
    double k = std::round(delta.real() / (2.0 * M_PI));
    if (std::abs(delta - Complex(2.0 * M_PI * k, 0)) > 1e-8)
      fail(Errc::BadGauge, "geometric_phases_loop: alpha_n does not close over theta_n",
           {{"n", double(n)}, {"defect", std::abs(delta - Complex(2.0 * M_PI * k, 0))}});
  }

  const int m = cycle_samples(c);
  const double ds = c.tau / m;
  auto ts = uniform_times(c.tau, m);

  const Propagator& p = *c.prop;
  PhaseReport rep;
  rep.tau = c.tau;
  rep.theta = c.theta;
  rep.branch_windings = c.windings;
  rep.beta.resize(d);
  rep.dynamical.resize(d);
  rep.holonomy_diag.resize(d);

  for (int n = 0; n < d; ++n) {
    CVec en = c.x0_system.right.col(n);
    CVec dn = c.x0_system.left.col(n);
    std::vector<CVec> bar(m + 1), dual(m + 1);
    for (int j = 0; j <= m; ++j) {
      Complex an = alpha[n](ts[j]);
      bar[j] = std::exp(Complex(0, -1) * an) * (p.bwd(ts[j]) * en);
      dual[j] = std::exp(Complex(0, -1) * std::conj(an)) * (p.fwd(ts[j]).adjoint() * dn);
    }
    // centered differences with cyclic wrap; rectangle sum over the period
    Complex acc(0, 0);
    for (int j = 0; j < m; ++j) {
      const CVec& prev = (j == 0) ? bar[m - 1] : bar[j - 1];
      const CVec& next = bar[j + 1];
      CVec deriv = (next - prev) / (2.0 * ds);
      acc += Complex(0, 1) * dual[j].dot(deriv) * ds;
    }
    rep.beta(n) = acc;
    rep.dynamical(n) = c.theta(n) - acc;
    rep.holonomy_diag(n) = std::exp(Complex(0, 1) * acc);
  }
  return rep;
}

CMat canonical_connection(const CMat& p, const CMat& q, const Decomposition& o0) {
  if (p.rows() != o0.dim() || q.rows() != o0.dim())
    fail(Errc::DimensionMismatch, "canonical_connection: dimension mismatch");
  double cp = cond2(p);
  if (!std::isfinite(cp) || cp > 1e12)
    fail(Errc::SingularFrame, "canonical_connection: P not invertible within tolerance",
         {{"cond", cp}});
  CMat m = Eigen::PartialPivLU<CMat>(p).solve(q);
  const int d = o0.dim();
  CVec coeff(d);
  for (int n = 0; n < d; ++n) coeff(n) = o0.dual_frame.col(n).dot(m * o0.frame.col(n));
  return o0.frame * coeff.asDiagonal() * o0.dual_frame.adjoint();
}

std::vector<CMat> horizontal_lift(const Propagator& p, const Decomposition& o0, const CMat& v0,
                                  const std::vector<double>& ts) {
  const int d = o0.dim();
  if (v0.rows() != d || v0.cols() != d)
    fail(Errc::DimensionMismatch, "horizontal_lift: V0 dimension mismatch");
  double cv = cond2(v0);
  if (!std::isfinite(cv) || cv > 1e12)
    fail(Errc::SingularFrame, "horizontal_lift: V0 not invertible", {{"cond", cv}});
  if (ts.size() < 2) fail(Errc::DomainError, "horizontal_lift: need at least two samples");

  Eigen::PartialPivLU<CMat> lu(v0);
  // <e*_n| Gamma^{-1} Gamma' |e_n> = i <e*_n| V0^{-1} h(t) V0 |e_n>
  auto coeff = [&](double t) {
    CMat b = lu.solve(p.generator(t) * v0);
    CVec c(d);
    for (int n = 0; n < d; ++n)
      c(n) = Complex(0, 1) * o0.dual_frame.col(n).dot(b * o0.frame.col(n));
    return c;
  };

  std::vector<CMat> lift;
  lift.reserve(ts.size());
  CVec q = CVec::Zero(d);
  CVec f_lo = coeff(ts[0]);
  lift.push_back(p.bwd(ts[0]) * v0);
  for (std::size_t j = 1; j < ts.size(); ++j) {
    double a = ts[j - 1], b = ts[j];
    CVec f_mid = coeff(0.5 * (a + b));
    CVec f_hi = coeff(b);
    q += (b - a) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    f_lo = f_hi;
    CVec pref(d);
    for (int n = 0; n < d; ++n) pref(n) = std::exp(-q(n));
    CMat gauge = o0.frame * pref.asDiagonal() * o0.dual_frame.adjoint();
    lift.push_back(p.bwd(ts[j]) * v0 * gauge);
  }
  return lift;
}

std::vector<CMat> horizontal_lift_ode(const Propagator& p, const Decomposition& o0,
                                      const CMat& v0, const std::vector<double>& ts) {
  const int d = o0.dim();
  if (v0.rows() != d || v0.cols() != d)
    fail(Errc::DimensionMismatch, "horizontal_lift_ode: V0 dimension mismatch");
  if (ts.size() < 2) fail(Errc::DomainError, "horizontal_lift_ode: need at least two samples");

  std::vector<CMat> lift;
  lift.reserve(ts.size());
  CMat gamma_prev = p.bwd(ts[0]) * v0;
  CMat g = CMat::Identity(d, d);
  lift.push_back(gamma_prev);
  for (std::size_t j = 1; j < ts.size(); ++j) {
    double dt = ts[j] - ts[j - 1];
    CMat gamma_next = p.bwd(ts[j]) * v0;
    CMat gamma_mid = 0.5 * (gamma_prev + gamma_next);
    CMat deriv = (gamma_next - gamma_prev) / dt;
    CMat m = Eigen::PartialPivLU<CMat>(gamma_mid).solve(deriv);
    CVec a(d);
    for (int n = 0; n < d; ++n) a(n) = -o0.dual_frame.col(n).dot(m * o0.frame.col(n));
    // exponential-midpoint update; the generator is diagonal in the O0 frame
    CVec e(d);
    for (int n = 0; n < d; ++n) e(n) = std::exp(dt * a(n));
    g = (o0.frame * e.asDiagonal() * o0.dual_frame.adjoint() * g).eval();
    lift.push_back(gamma_next * g);
    gamma_prev = gamma_next;
  }
  return lift;
}

double lift_connection_defect(const std::vector<CMat>& lift, const Decomposition& o0,
                              double dt) {
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < lift.size(); ++k) {
    CMat deriv = (lift[k + 1] - lift[k - 1]) / (2.0 * dt);
    worst = std::max(worst, op_norm(canonical_connection(lift[k], deriv, o0)));
  }
  return worst;
}

CMat holonomy(const std::vector<CMat>& lift, const CyclicEvolution& c, const Decomposition& o0,
              const CMat& v0, double tol) {
  if (lift.empty()) fail(Errc::DomainError, "holonomy: empty lift");
  const CMat& vt = lift.back();
  Decomposition x0d = Decomposition::from_eigensystem(c.x0_system);
  double fiber_defect = hausdorff_distance(Decomposition::from_frame(v0 * o0.frame), x0d);
  if (fiber_defect > tol)
    fail(Errc::NotInFiber, "holonomy: V0 does not conjugate O0 to the cycle start",
         {{"defect", fiber_defect}, {"tol", tol}});
  double defect = hausdorff_distance(Decomposition::from_frame(vt * o0.frame), x0d);
  if (defect > tol)
    fail(Errc::NotCyclic, "holonomy: lift does not close over the cycle",
         {{"defect", defect}, {"tol", tol}});
  return vt;
}

CVec holonomy_phases(const CMat& hol, const CMat& v0, const Decomposition& o0) {
  CMat m = Eigen::PartialPivLU<CMat>(v0).solve(hol);
  const int d = o0.dim();
  CVec ph(d);
  for (int n = 0; n < d; ++n) ph(n) = o0.dual_frame.col(n).dot(m * o0.frame.col(n));
  return ph;
}

Complex fold_phase(Complex beta) {
  Complex z = std::exp(Complex(0, 1) * beta);
  return Complex(std::arg(z), beta.imag());
}

double multiset_phase_distance(const CVec& a, const CVec& b) {
  const int d = static_cast<int>(a.size());
  if (b.size() != d) fail(Errc::DimensionMismatch, "multiset_phase_distance: size mismatch");
  std::vector<Complex> fa(d), fb(d);
  for (int i = 0; i < d; ++i) { fa[i] = fold_phase(a(i)); fb[i] = fold_phase(b(i)); }
  auto pair_dist = [&](Complex x, Complex y) {
    return std::max(wrapped_abs(x.real() - y.real()), std::fabs(x.imag() - y.imag()));
  };
  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  if (d <= 7) {
    do {
      double worst = 0.0;
      for (int i = 0; i < d; ++i) worst = std::max(worst, pair_dist(fa[i], fb[idx[i]]));
      best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
  } else {
    // greedy nearest matching
    std::vector<bool> used(d, false);
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
      int pick = -1;
      double dmin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < d; ++j)
        if (!used[j] && pair_dist(fa[i], fb[j]) < dmin) { dmin = pair_dist(fa[i], fb[j]); pick = j; }
      used[pick] = true;
      worst = std::max(worst, dmin);
    }
    best = worst;
  }
  return best;
}

PhaseAnalysis analyze_phases(const std::function<CMat(double)>& h, const CMat& x0,
                             double horizon, int steps, int order, double detect_tol) {
  auto p = std::make_shared<Propagator>(make_propagator(h, horizon, steps, order));
  auto traj = heisenberg_evolve(x0, *p);
  PhaseAnalysis out;
  out.cycle = detect_cycle(traj, p, detect_tol);
  out.report = geometric_phases(out.cycle, h);
  return out;
}

InvarianceReport invariance_suite(const CyclicEvolution& c, const std::function<CMat(double)>& h,
                                  int trials, unsigned seed) {
  InvarianceReport rep;
  rep.trials = trials;
  const int d = c.x0_system.dim();
  std::mt19937_64 rng(seed);

  PhaseReport base = geometric_phases(c, h);
  const double tau = c.tau;
  const CMat x0 = spectral_apply(c.x0_system, [](Complex z) { return z; });

  // (a) random smooth time reparameterizations fixing endpoints
  std::uniform_real_distribution<double> amp(-0.15, 0.15);
  for (int trial = 0; trial < trials; ++trial) {
    double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
    auto s = [=](double t) {
      if (t >= tau) return t;
      return t + a1 * (tau / M_PI) * std::sin(M_PI * t / tau) +
             a2 * (tau / (2 * M_PI)) * std::sin(2 * M_PI * t / tau) +
             a3 * (tau / (3 * M_PI)) * std::sin(3 * M_PI * t / tau);
    };
    auto sp = [=](double t) {
      if (t >= tau) return 1.0;
      return 1.0 + a1 * std::cos(M_PI * t / tau) + a2 * std::cos(2 * M_PI * t / tau) +
             a3 * std::cos(3 * M_PI * t / tau);
    };
    auto h_rep = [&, s, sp](double t) { return CMat(sp(t) * h(s(t))); };
    int steps = std::max(256, static_cast<int>(std::ceil(1.02 * tau / c.prop->dt)));
    PhaseAnalysis pa = analyze_phases(h_rep, x0, 1.02 * tau, steps, c.prop->order);
    rep.reparam_deviation =
        std::max(rep.reparam_deviation, multiset_phase_distance(base.beta, pa.report.beta));
  }

  // (b) random gauge starting points
  Decomposition o0 = Decomposition::standard(d);
  CMat v0 = c.x0_system.right;
  auto ts = uniform_times(tau, cycle_samples(c));
  for (int trial = 0; trial < trials; ++trial) {
    GaugeElem g = GaugeElem::random_draw(d, rng);
    CMat v0g = v0 * g.matrix(o0);
    auto lift = horizontal_lift(*c.prop, o0, v0g, ts);
    CMat hol = holonomy(lift, c, o0, v0g, std::max(1e-6, 100.0 * c.cycle_defect));
    CVec ph = holonomy_phases(hol, v0g, o0);
    CVec beta_g(d);
    for (int n = 0; n < d; ++n) beta_g(n) = Complex(0, -1) * std::log(ph(n));
    rep.gauge_deviation =
        std::max(rep.gauge_deviation, multiset_phase_distance(base.beta, beta_g));
  }

  // (c) random measurement points O0' = T O0 T^{-1}, transported connection,
  //     plus the canonical connection at O0' recorded as information
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    CMat t(d, d);
    do {
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) t(i, j) = Complex(gauss(rng), gauss(rng));
    } while (cond2(t) > 1e3);
    Decomposition o0p = Decomposition::from_frame(t * o0.frame);
    CMat v0p = v0 * Eigen::PartialPivLU<CMat>(t).inverse();

    auto lift = horizontal_lift_ode(*c.prop, o0p, v0p, ts);
    CMat hol = holonomy(lift, c, o0p, v0p, std::max(1e-5, 1000.0 * c.cycle_defect));
    CVec ph = holonomy_phases(hol, v0p, o0p);
    CVec beta_m(d);
    for (int n = 0; n < d; ++n) beta_m(n) = Complex(0, -1) * std::log(ph(n));
    rep.measurement_deviation =
        std::max(rep.measurement_deviation, multiset_phase_distance(base.beta, beta_m));

    // canonical connection evaluated directly at the new measurement point
    auto lift2 = horizontal_lift(*c.prop, o0p, v0p, ts);
    CMat hol2 = holonomy(lift2, c, o0p, v0p, std::max(1e-5, 1000.0 * c.cycle_defect));
    CVec ph2 = holonomy_phases(hol2, v0p, o0p);
    CVec beta_c(d);
    for (int n = 0; n < d; ++n) beta_c(n) = Complex(0, -1) * std::log(ph2(n));
    rep.canonical_new_o0_deviation =
        std::max(rep.canonical_new_o0_deviation, multiset_phase_distance(base.beta, beta_c));
  }
  return rep;
}

}  // namespace nhqm
