#pragma once

#include <memory>
#include <vector>

#include "nhqm/paraops.hpp"

namespace nhqm {

/// U(t) = e^{-itH} for para-Hermitian H (Schrodinger sign convention;
/// the e^{+itH} group is obtained via t -> -t).
CMat group(const CMat& h, double t);
CMat group(const EigSystem& hsys, double t);

struct StoneReport {
  double group_law_defect = 0.0;   // max ||U(t+s) - U(t)U(s)|| over the time set
  double norm_bound = 0.0;         // ||G^{-1/2}|| ||G^{1/2}||
  double max_norm_excess = 0.0;    // max(0, ||U(t)|| - norm_bound)
  std::vector<double> deltas;
  std::vector<double> generator_errors;  // ||(U(d)-I)/d + iH||
  double recovery_rate = 0.0;            // log-log slope, ~1 for first order
};

StoneReport stone_check(const CMat& h, const std::vector<double>& times, double tol = 1e-8);

/// Sampled two-parameter evolution family U(t,s) for i dU/dt = h(t) U.
struct Propagator {
  std::vector<double> grid;        // t_0 = 0, ..., t_K = T
  std::vector<CMat> step_fwd;      // U(t_{k+1}, t_k)
  std::vector<CMat> cum_fwd;       // U(t_k, 0); cum_fwd[0] = I
  std::vector<CMat> cum_bwd;       // U(0, t_k)
  std::function<CMat(double)> generator;
  int order = 2;
  double dt = 0.0;
  int dim = 0;

  double horizon() const { return grid.back(); }
  int steps() const { return static_cast<int>(step_fwd.size()); }

  /// U(t, 0), off-grid times by one local sub-step from the grid node below.
  CMat fwd(double t) const;
  /// U(0, t).
  CMat bwd(double t) const;
  /// U(t, s) = U(t,0) U(0,s).
  CMat between(double t, double s) const { return fwd(t) * bwd(s); }

  /// One integrator step over [a, b]: (U(b,a), U(a,b)).
  std::pair<CMat, CMat> local_step(double a, double b) const;
};

/// Exponential-midpoint (order 2) or two-node Magnus with a single
/// commutator term (order 4).  h(t) must be para-Hermitian at every
/// evaluation point (real-spectrum check per sample).
Propagator make_propagator(const std::function<CMat(double)>& h, double t_final, int steps,
                           int order = 2);

std::vector<CVec> evolve_state(const Propagator& p, const CVec& psi0);

struct BrachistochroneResult {
  double r = 0.0, theta = 0.0, gamma = 0.0;
  double omega = 0.0;            // eigenvalue gap 2 sqrt(gamma^2 - r^2 sin^2 theta)
  double phi = 0.0;              // sin(phi) = (r/gamma) sin(theta)
  double t_transfer = 0.0;       // (2 phi + pi) / omega
  double t_simulated = 0.0;      // first passage |0> -> |1| located by simulation
  double hermitian_bound = 0.0;  // pi / omega
};

/// Transfer-time analysis for the two-level family, with the analytic time
/// confirmed by direct simulation and root refinement.
BrachistochroneResult brachistochrone(double r, double theta, double gamma,
                                      int steps_per_unit = 1000);

}  // namespace nhqm
