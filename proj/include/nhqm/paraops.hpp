#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "nhqm/linalg.hpp"

namespace nhqm {

/// Hermitian positive-definite metric with cached square roots.
struct MetricOp {
  CMat g;
  CMat sqrt;
  CMat inv_sqrt;
  double min_eig = 0.0;
  double max_eig = 0.0;

  int dim() const { return static_cast<int>(g.rows()); }

  static MetricOp from_matrix(const CMat& g, double tol_pd = -1.0);
  static MetricOp identity_metric(int d);
};

/// G = sum_n |e*_n><e*_n| built from an eigensystem's dual family.
MetricOp metric_from_eigensystem(const EigSystem& sys);

/// G^{1/2} T G^{-1/2}; Hermitian iff G is a metric for T.
CMat hermitianize(const CMat& t, const MetricOp& g);

/// Quasi-Hermitian relation ||G T - T^H G|| <= tol ||G|| ||T||.
bool is_metric_for(const MetricOp& g, const CMat& t, double tol = 1e-10);

/// Pseudo-Hermitian relation T^H eta = eta T with Hermitian invertible eta.
bool is_pseudo_hermitian(const CMat& t, const CMat& eta, double tol = 1e-10);

/// Finite-dimensional functional calculus f(T) = sum f(lambda_n)|e_n><e*_n|.
CMat func_calc(const EigSystem& sys, const std::function<Complex(Complex)>& f);

/// Eigensystem of T, throwing NotParaHermitian unless T is diagonalizable
/// with real spectrum (|Im lambda| <= tol * max(1, rho)).
EigSystem para_hermitian_eigensystem(const CMat& t, double tol = 1e-8);

enum class OperatorKind {
  Hermitian,
  ParaHermitianNonHermitian,
  ParaUnitary,
  Unitary,
  ComplexSpectrum,
  NonDiagonalizable,
};

const char* kind_name(OperatorKind k);

struct Classification {
  OperatorKind kind = OperatorKind::ComplexSpectrum;
  std::optional<MetricOp> witness_metric;
  CVec spectrum;
  std::map<std::string, double> diagnostics;
};

/// Observable-side classification: diagonalizability gate, then real-spectrum
/// test.  Non-real spectra report ComplexSpectrum (not a valid observable),
/// with the unit-circle defect still available in diagnostics.
Classification classify(const CMat& t, double tol = 1e-8);

/// Evolution-side classification of the same data: unitary / para-unitary
/// labels for unimodular spectra.
Classification classify_evolution(const CMat& u, double tol = 1e-8);

/// Deformed Pauli triple (sigma^w_x, sigma^w_y, sigma^w_z), |w| < pi/2.
std::array<CMat, 3> deformed_pauli(double omega);

struct TwoLevel {
  CMat h;
  double r = 0.0, theta = 0.0, gamma = 0.0;
  bool broken = false;     // gamma^2 <= r^2 sin^2(theta): complex spectrum
  double omega_gap = 0.0;  // 2 sqrt(gamma^2 - r^2 sin^2 theta), unbroken only
  double phi = 0.0;        // sin(phi) = (r/gamma) sin(theta), unbroken only
  double lambda_plus = 0.0, lambda_minus = 0.0;
};

/// [[r e^{i theta}, gamma], [gamma, r e^{-i theta}]] with regime report.
TwoLevel two_level_hamiltonian(double r, double theta, double gamma);

}  // namespace nhqm
