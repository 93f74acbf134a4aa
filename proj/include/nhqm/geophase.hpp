#pragma once

#include <memory>
#include <random>
#include <vector>

#include "nhqm/evolve.hpp"

namespace nhqm {

/// Resolution of identity into rank-one skew projections P_n = |n><n*|.
struct Decomposition {
  std::vector<CMat> projectors;
  CMat frame;       // columns |n>
  CMat dual_frame;  // columns |n*>, <n*|m> = delta_nm

  int dim() const { return static_cast<int>(frame.rows()); }

  static Decomposition from_frame(const CMat& v);
  static Decomposition from_eigensystem(const EigSystem& sys);
  static Decomposition standard(int d);
};

/// D(O,O') = max_a min_b ||a-b|| + max_b min_a ||a-b|| over the projector
/// sets, operator norm.  Zero iff the decompositions coincide as sets.
double hausdorff_distance(const Decomposition& o1, const Decomposition& o2);

/// Permutation + nonzero scalars: g |e_n> = c_n |e_{sigma(n)}>.
struct GaugeElem {
  std::vector<int> perm;
  CVec scalars;

  CMat matrix(const Decomposition& o0) const;
  static GaugeElem random_draw(int d, std::mt19937_64& rng);
};

/// Heisenberg trajectory X(t_k) = U(0,t_k) X0 U(t_k,0) on the grid.
std::vector<CMat> heisenberg_evolve(const CMat& x0, const Propagator& p);

struct CyclicEvolution {
  EigSystem x0_system;
  double tau = 0.0;
  CVec theta;                    // principal branch, Re in (-pi, pi]
  std::vector<int> windings;     // continuity-tracked 2pi windings of the
                                 // trajectory overlap (diagnostic)
  double cycle_defect = 0.0;     // max_n ||U(0,tau) psi_n - mu_n psi_n||
  std::shared_ptr<const Propagator> prop;
};

/// Locate the first return of the decomposition of X(t) to that of X(0).
/// tol gates the grid scan; the return time is then refined off-grid.
CyclicEvolution detect_cycle(const std::vector<CMat>& x_traj,
                             std::shared_ptr<const Propagator> p, double tol);

struct PhaseReport {
  double tau = 0.0;
  CVec theta;
  CVec dynamical;      // integral of <psi*_n(0)| h(t) |psi_n(0)>
  CVec beta;           // theta_n - dynamical_n, principal theta branch
  CVec holonomy_diag;  // e^{i beta_n} read off the horizontal lift
  std::vector<int> branch_windings;
};

PhaseReport geometric_phases(const CyclicEvolution& c, const std::function<CMat(double)>& h);

/// Loop-integral form over closed paths e^{-i alpha_n(t)} psi_n(t) with
/// alpha_n(tau) - alpha_n(0) = theta_n.
PhaseReport geometric_phases_loop(const CyclicEvolution& c,
                                  const std::vector<std::function<Complex(double)>>& alpha);

/// Canonical connection value P^{-1} * Q = sum <e*_n|P^{-1}Q|e_n> |e_n><e*_n|.
CMat canonical_connection(const CMat& p, const CMat& q, const Decomposition& o0);

/// Closed-form horizontal lift of the frame path Gamma(t) = U(0,t) V0,
/// sampled at `ts`.
std::vector<CMat> horizontal_lift(const Propagator& p, const Decomposition& o0, const CMat& v0,
                                  const std::vector<double>& ts);

/// Same lift from the gauge ODE G' = -Omega_Gamma[Gamma'] G with
/// finite-difference Gamma'; independent cross-check of the closed form.
std::vector<CMat> horizontal_lift_ode(const Propagator& p, const Decomposition& o0,
                                      const CMat& v0, const std::vector<double>& ts);

/// max_t || Omega_{V(t)}[dV/dt] || with centered differences.
double lift_connection_defect(const std::vector<CMat>& lift, const Decomposition& o0,
                              double dt);

/// Holonomy element Vtilde(tau) of a lift closing over a cyclic evolution.
CMat holonomy(const std::vector<CMat>& lift, const CyclicEvolution& c, const Decomposition& o0,
              const CMat& v0, double tol = 1e-6);

/// Diagonal phases <e*_n| V0^{-1} Vtilde(tau) |e_n> in the O0 frame.
CVec holonomy_phases(const CMat& hol, const CMat& v0, const Decomposition& o0);

std::vector<double> uniform_times(double t_end, int samples);

struct InvarianceReport {
  int trials = 0;
  double reparam_deviation = 0.0;
  double gauge_deviation = 0.0;
  double measurement_deviation = 0.0;
  double canonical_new_o0_deviation = 0.0;  // informational, not asserted
};

/// Invariance checks: random time reparameterizations, random
/// gauge starting points, random measurement points.  Deviations are
/// multiset distances of beta mod 2pi (Re folded, Im exact).
InvarianceReport invariance_suite(const CyclicEvolution& c, const std::function<CMat(double)>& h,
                                  int trials, unsigned seed = 1234);

/// Fold beta to its principal representative: Re in (-pi, pi], Im exact.
Complex fold_phase(Complex beta);

/// Min over pairings of max component distance, Re compared on the circle.
double multiset_phase_distance(const CVec& a, const CVec& b);

struct PhaseAnalysis {
  CyclicEvolution cycle;
  PhaseReport report;
};

/// Full pipeline: propagate, Heisenberg-evolve, detect the cycle, compute
/// phases and the holonomy.
PhaseAnalysis analyze_phases(const std::function<CMat(double)>& h, const CMat& x0,
                             double horizon, int steps, int order = 2,
                             double detect_tol = 1e-4);

}  // namespace nhqm
