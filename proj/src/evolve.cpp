#include "nhqm/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace nhqm {

namespace {

void check_real_spectrum_fast(const CMat& h, double t) {
  Eigen::ComplexEigenSolver<CMat> ev(h, /*computeEigenvectors=*/false);
  double rho = 0.0, mi = 0.0;
  for (Eigen::Index k = 0; k < ev.eigenvalues().size(); ++k) {
    rho = std::max(rho, std::abs(ev.eigenvalues()(k)));
    mi = std::max(mi, std::abs(ev.eigenvalues()(k).imag()));
  }
  if (mi > 1e-8 * std::max(1.0, rho))
    fail(Errc::NotParaHermitian, "h(t) spectrum is not real at a sampled time",
         {{"t", t}, {"max_im", mi}});
}

}  // namespace

CMat group(const EigSystem& hsys, double t) {
  return spectral_apply(hsys, [t](Complex lam) { return std::exp(Complex(0, -t) * lam); });
}

CMat group(const CMat& h, double t) {
  EigSystem sys = para_hermitian_eigensystem(h);
  return group(sys, t);
}

StoneReport stone_check(const CMat& h, const std::vector<double>& times, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "stone_check: tol must be positive");
  EigSystem sys = para_hermitian_eigensystem(h);
  MetricOp g = metric_from_eigensystem(sys);

  StoneReport rep;
  rep.norm_bound = op_norm(g.inv_sqrt) * op_norm(g.sqrt);

  for (double t : times) {
    CMat ut = group(sys, t);
    rep.max_norm_excess = std::max(rep.max_norm_excess, op_norm(ut) - rep.norm_bound);
    for (double s : times) {
      CMat defect = group(sys, t + s) - ut * group(sys, s);
      rep.group_law_defect = std::max(rep.group_law_defect, op_norm(defect));
    }
  }
  rep.max_norm_excess = std::max(rep.max_norm_excess, 0.0);

  rep.deltas = {1e-2, 1e-3, 1e-4};
  const CMat ident = CMat::Identity(h.rows(), h.cols());
  for (double d : rep.deltas) {
    CMat diff = (group(sys, d) - ident) / d + Complex(0, 1) * h;
    rep.generator_errors.push_back(op_norm(diff));
  }
  // least-squares slope of log err against log delta
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = static_cast<int>(rep.deltas.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(rep.deltas[i]), y = std::log(std::max(rep.generator_errors[i], 1e-300));
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  rep.recovery_rate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return rep;
}

std::pair<CMat, CMat> Propagator::local_step(double a, double b) const {
  double h_ = b - a;
  if (order == 2) {
    CMat hm = generator(a + 0.5 * h_);
    CMat om = Complex(0, -h_) * hm;
    return {mat_exp(om), mat_exp(CMat(-om))};
  }
  // two-node Gauss-Legendre Magnus with the single commutator term
  static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  CMat a1 = Complex(0, -1) * generator(a + c1 * h_);
  CMat a2 = Complex(0, -1) * generator(a + c2 * h_);
  CMat om = 0.5 * h_ * (a1 + a2) +
            (std::sqrt(3.0) * h_ * h_ / 12.0) * (a2 * a1 - a1 * a2);
  return {mat_exp(om), mat_exp(CMat(-om))};
}

CMat Propagator::fwd(double t) const {
  if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
    fail(Errc::DomainError, "Propagator: time outside the sampled horizon", {{"t", t}});
  int k = std::min<int>(steps(), std::max(0, static_cast<int>(std::floor(t / dt))));
  double tk = grid[k];
  if (std::abs(t - tk) < 1e-14 * std::max(1.0, std::abs(t))) return cum_fwd[k];
  if (k == steps()) return cum_fwd[k];
  auto [u, ui] = local_step(tk, t);
  return u * cum_fwd[k];
}

CMat Propagator::bwd(double t) const {
  if (t < grid.front() - 1e-12 || t > grid.back() + 1e-12)
    fail(Errc::DomainError, "Propagator: time outside the sampled horizon", {{"t", t}});
  int k = std::min<int>(steps(), std::max(0, static_cast<int>(std::floor(t / dt))));
  double tk = grid[k];
  if (std::abs(t - tk) < 1e-14 * std::max(1.0, std::abs(t))) return cum_bwd[k];
  if (k == steps()) return cum_bwd[k];
  auto [u, ui] = local_step(tk, t);
  return cum_bwd[k] * ui;
}

Propagator make_propagator(const std::function<CMat(double)>& h, double t_final, int steps,
                           int order) {
  if (steps < 1) fail(Errc::DomainError, "make_propagator: steps must be >= 1");
  if (t_final <= 0.0) fail(Errc::DomainError, "make_propagator: horizon must be positive");
  if (order != 2 && order != 4) fail(Errc::DomainError, "make_propagator: order must be 2 or 4");

  Propagator p;
  p.generator = h;
  p.order = order;
  p.dt = t_final / steps;
  p.grid.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) p.grid[k] = t_final * k / steps;

  CMat h0 = h(0.0);
  if (h0.rows() != h0.cols()) fail(Errc::DimensionMismatch, "make_propagator: h(t) must be square");
  p.dim = static_cast<int>(h0.rows());
  check_real_spectrum_fast(h0, 0.0);

  p.step_fwd.reserve(steps);
  p.cum_fwd.reserve(steps + 1);
  p.cum_bwd.reserve(steps + 1);
  p.cum_fwd.push_back(CMat::Identity(p.dim, p.dim));
  p.cum_bwd.push_back(CMat::Identity(p.dim, p.dim));

  for (int k = 0; k < steps; ++k) {
    double a = p.grid[k], b = p.grid[k + 1];
    if (order == 2) {
      check_real_spectrum_fast(h(0.5 * (a + b)), 0.5 * (a + b));
    } else {
      static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
      static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
      check_real_spectrum_fast(h(a + c1 * (b - a)), a + c1 * (b - a));
      check_real_spectrum_fast(h(a + c2 * (b - a)), a + c2 * (b - a));
    }
    auto [u, ui] = p.local_step(a, b);
    p.step_fwd.push_back(u);
    p.cum_fwd.push_back(u * p.cum_fwd.back());
    p.cum_bwd.push_back(p.cum_bwd.back() * ui);
    if (!all_finite(p.cum_fwd.back()))
      fail(Errc::NumericalFailure, "make_propagator: overflow while stepping", {{"t", b}});
  }
  return p;
}

std::vector<CVec> evolve_state(const Propagator& p, const CVec& psi0) {
  if (psi0.size() != p.dim) fail(Errc::DimensionMismatch, "evolve_state: dimension mismatch");
  if (psi0.norm() <= 0.0) fail(Errc::ZeroState, "evolve_state: zero state");
  std::vector<CVec> out;
  out.reserve(p.cum_fwd.size());
  for (const auto& u : p.cum_fwd) out.push_back(u * psi0);
  return out;
}

BrachistochroneResult brachistochrone(double r, double theta, double gamma,
                                      int steps_per_unit) {
  TwoLevel tl = two_level_hamiltonian(r, theta, gamma);
  if (tl.broken)
    fail(Errc::BrokenRegime, "brachistochrone: gamma^2 <= r^2 sin^2 theta",
         {{"r", r}, {"theta", theta}, {"gamma", gamma}});

  BrachistochroneResult res;
  res.r = r;
  res.theta = theta;
  res.gamma = gamma;
  res.omega = tl.omega_gap;
  res.phi = tl.phi;
  res.t_transfer = (2.0 * tl.phi + M_PI) / tl.omega_gap;
  res.hermitian_bound = M_PI / tl.omega_gap;

  // simulate |0> under the Pade-exponential stepper (independent of the
  // closed-form transfer time) and locate the first zero of <0|psi(t)>
  const CMat& h = tl.h;
  double t_sim = 1.05 * 2.0 * M_PI / tl.omega_gap;
  int steps = std::max({static_cast<int>(std::ceil(steps_per_unit * t_sim)), 4096});
  double dt = t_sim / steps;
  CMat e = mat_exp(h, Complex(0, -dt));
  CVec psi(2);
  psi << Complex(1, 0), Complex(0, 0);

  auto defect_of = [](const CVec& v) {
    return 1.0 - std::norm(v(1)) / v.squaredNorm();
  };

  int hit = -1;
  double dprev = defect_of(psi);
  CVec cur = psi;
  std::vector<double> defects(steps + 1);
  defects[0] = dprev;
  for (int k = 1; k <= steps; ++k) {
    cur = e * cur;
    defects[k] = defect_of(cur);
    if (defects[k] < 2e-2 && hit < 0) hit = k;
  }
  if (hit < 0)
    fail(Errc::NumericalFailure, "brachistochrone: no passage found within the horizon");
  // walk to the local minimum of the dip
  int m = hit;
  while (m + 1 <= steps && defects[m + 1] < defects[m]) ++m;
  while (m - 1 >= 1 && defects[m - 1] < defects[m]) --m;

  auto state_at = [&](double t) { return CVec(mat_exp(h, Complex(0, -t)) * psi); };
  auto c_at = [&](double t) { return state_at(t)(0); };

  double lo = dt * std::max(0, m - 1), hi = dt * std::min(steps, m + 1);
  double t = dt * m;
  for (int it = 0; it < 60; ++it) {
    CVec v = state_at(t);
    Complex c = v(0);
    Complex cp = (Complex(0, -1) * (h * v))(0);
    if (std::abs(cp) == 0.0) break;
    double upd = (c / cp).real();
    double tn = t - upd;
    if (tn < lo || tn > hi) {  // bisect on the ternary-shrunk bracket instead
      double a = lo, b = hi;
      for (int j = 0; j < 80; ++j) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        if (std::abs(c_at(m1)) < std::abs(c_at(m2))) b = m2; else a = m1;
      }
      tn = 0.5 * (a + b);
      t = tn;
      break;
    }
    t = tn;
    if (std::abs(upd) < 1e-13 * std::max(1.0, t)) break;
  }
  res.t_simulated = t;

  double final_defect = defect_of(state_at(t));
  if (final_defect > 1e-9)
    fail(Errc::NumericalFailure, "brachistochrone: refined passage misses the target state",
         {{"defect", final_defect}});
  return res;
}

}  // namespace nhqm
