#include "nhqm/paraops.hpp"

#include <cmath>

namespace nhqm {

MetricOp MetricOp::from_matrix(const CMat& g, double tol_pd) {
  MetricOp m;
  m.g = 0.5 * (g + g.adjoint());
  auto [s, si] = herm_sqrt(m.g, tol_pd);
  m.sqrt = s;
  m.inv_sqrt = si;
  EigSystem es = herm_eig(m.g);
  m.min_eig = es.eigenvalues.real().minCoeff();
  m.max_eig = es.eigenvalues.real().maxCoeff();
  return m;
}

MetricOp MetricOp::identity_metric(int d) {
  MetricOp m;
  m.g = CMat::Identity(d, d);
  m.sqrt = m.g;
  m.inv_sqrt = m.g;
  m.min_eig = 1.0;
  m.max_eig = 1.0;
  return m;
}

MetricOp metric_from_eigensystem(const EigSystem& sys) {
  CMat g = sys.left * sys.left.adjoint();
  return MetricOp::from_matrix(g);
}

CMat hermitianize(const CMat& t, const MetricOp& g) {
  if (t.rows() != g.dim())
    fail(Errc::DimensionMismatch, "hermitianize: dimension mismatch");
  return g.sqrt * t * g.inv_sqrt;
}

bool is_metric_for(const MetricOp& g, const CMat& t, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "is_metric_for: tol must be positive");
  double defect = op_norm(g.g * t - t.adjoint() * g.g);
  return defect <= tol * op_norm(g.g) * std::max(op_norm(t), 1e-300);
}

bool is_pseudo_hermitian(const CMat& t, const CMat& eta, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "is_pseudo_hermitian: tol must be positive");
  double ne = op_norm(eta);
  if (op_norm(eta - eta.adjoint()) > 1e-10 * std::max(ne, 1.0))
    fail(Errc::NotHermitian, "is_pseudo_hermitian: eta is not Hermitian");
  double c = cond2(eta);
  if (!std::isfinite(c) || c > 1e12)
    fail(Errc::SingularEta, "is_pseudo_hermitian: eta not invertible within tolerance",
         {{"cond", c}});
  double defect = op_norm(t.adjoint() * eta - eta * t);
  return defect <= tol * ne * std::max(op_norm(t), 1e-300);
}

CMat func_calc(const EigSystem& sys, const std::function<Complex(Complex)>& f) {
  return spectral_apply(sys, f);
}

EigSystem para_hermitian_eigensystem(const CMat& t, double tol) {
  EigSystem sys;
  try {
    sys = eig_general(t);
  } catch (const Error& e) {
    if (e.code() == Errc::NonDiagonalizable)
      fail(Errc::NotParaHermitian, "operator is not diagonalizable", e.diagnostics());
    throw;
  }
  double rho = 0.0;
  for (int k = 0; k < sys.dim(); ++k) rho = std::max(rho, std::abs(sys.eigenvalues(k)));
  double tol_spec = tol * std::max(1.0, rho);
  for (int k = 0; k < sys.dim(); ++k)
    if (std::abs(sys.eigenvalues(k).imag()) > tol_spec)
      fail(Errc::NotParaHermitian, "operator spectrum is not real",
           {{"max_im", std::abs(sys.eigenvalues(k).imag())}});
  return sys;
}

const char* kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Hermitian: return "Hermitian";
    case OperatorKind::ParaHermitianNonHermitian: return "ParaHermitianNonHermitian";
    case OperatorKind::ParaUnitary: return "ParaUnitary";
    case OperatorKind::Unitary: return "Unitary";
    case OperatorKind::ComplexSpectrum: return "ComplexSpectrum";
    case OperatorKind::NonDiagonalizable: return "NonDiagonalizable";
  }
  return "Unknown";
}

namespace {

struct SpectrumTests {
  CVec spectrum;
  double herm_defect = 0.0;
  double max_im = 0.0;
  double max_circle = 0.0;
  double kappa = 0.0;
  double scale = 1.0;
  bool diagonalizable = true;
  std::optional<EigSystem> sys;
};

SpectrumTests run_tests(const CMat& t, double tol) {
  SpectrumTests r;
  double nt = op_norm(t);
  r.herm_defect = op_norm(t - t.adjoint());
  r.scale = std::max(1.0, spectral_radius_upper(t));
  try {
    r.sys = eig_general(t, std::max(tol, 1e-12));
  } catch (const Error& e) {
    if (e.code() == Errc::NonDiagonalizable) {
      r.diagonalizable = false;
      for (const auto& [k, v] : e.diagnostics())
        if (k == "kappa") r.kappa = v;
      Eigen::ComplexEigenSolver<CMat> ev(t, false);
      r.spectrum = ev.eigenvalues();
      return r;
    }
    throw;
  }
  r.kappa = r.sys->frame_condition;
  r.spectrum = r.sys->eigenvalues;
  for (int k = 0; k < r.sys->dim(); ++k) {
    r.max_im = std::max(r.max_im, std::abs(r.spectrum(k).imag()));
    r.max_circle = std::max(r.max_circle, std::abs(std::abs(r.spectrum(k)) - 1.0));
  }
  (void)nt;
  return r;
}

void fill_diag(Classification& c, const SpectrumTests& r, const CMat& t) {
  c.spectrum = r.spectrum;
  c.diagnostics["hermiticity_defect"] = r.herm_defect;
  c.diagnostics["max_im_lambda"] = r.max_im;
  c.diagnostics["max_unit_circle_defect"] = r.max_circle;
  c.diagnostics["kappa"] = r.kappa;
  c.diagnostics["unitarity_defect"] = op_norm(t.adjoint() * t - CMat::Identity(t.rows(), t.cols()));
}

}  // namespace

Classification classify(const CMat& t, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "classify: tol must be positive");
  SpectrumTests r = run_tests(t, tol);
  Classification c;
  fill_diag(c, r, t);
  if (!r.diagonalizable) {
    c.kind = OperatorKind::NonDiagonalizable;
    return c;
  }
  double tol_spec = tol * r.scale;
  if (r.max_im <= tol_spec) {
    if (r.herm_defect <= tol * std::max(op_norm(t), 1.0)) {
      c.kind = OperatorKind::Hermitian;
    } else {
      c.kind = OperatorKind::ParaHermitianNonHermitian;
      MetricOp g = metric_from_eigensystem(*r.sys);
      if (!is_metric_for(g, t, std::max(tol, 1e-9)))
        fail(Errc::NumericalFailure, "classify: witness metric failed verification");
      c.witness_metric = std::move(g);
    }
    return c;
  }
  c.kind = OperatorKind::ComplexSpectrum;
  return c;
}

Classification classify_evolution(const CMat& u, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "classify_evolution: tol must be positive");
  SpectrumTests r = run_tests(u, tol);
  Classification c;
  fill_diag(c, r, u);
  if (!r.diagonalizable) {
    c.kind = OperatorKind::NonDiagonalizable;
    return c;
  }
  double tol_spec = tol * r.scale;
  if (r.max_circle <= tol_spec) {
    double udef = c.diagnostics["unitarity_defect"];
    c.kind = (udef <= tol * std::max(op_norm(u), 1.0)) ? OperatorKind::Unitary
                                                       : OperatorKind::ParaUnitary;
    return c;
  }
  if (r.max_im <= tol_spec) {
    c.kind = (r.herm_defect <= tol * std::max(op_norm(u), 1.0))
                 ? OperatorKind::Hermitian
                 : OperatorKind::ParaHermitianNonHermitian;
    return c;
  }
  c.kind = OperatorKind::ComplexSpectrum;
  return c;
}

std::array<CMat, 3> deformed_pauli(double omega) {
  if (!(std::abs(omega) < M_PI / 2))
    fail(Errc::DomainError, "deformed_pauli: |omega| must be below pi/2", {{"omega", omega}});
  double c = std::cos(omega), s = std::sin(omega);
  CMat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << Complex(0, -s) / c, Complex(1, 0) / c, Complex(1, 0) / c, Complex(0, s) / c;
  sy << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  sz << Complex(1, 0) / c, Complex(0, s) / c, Complex(0, s) / c, Complex(-1, 0) / c;
  return {sx, sy, sz};
}

TwoLevel two_level_hamiltonian(double r, double theta, double gamma) {
  TwoLevel out;
  out.r = r;
  out.theta = theta;
  out.gamma = gamma;
  out.h.resize(2, 2);
  out.h << r * std::exp(Complex(0, theta)), Complex(gamma, 0),
           Complex(gamma, 0), r * std::exp(Complex(0, -theta));
  double disc = gamma * gamma - r * r * std::sin(theta) * std::sin(theta);
  if (disc <= 0.0) {
    out.broken = true;
    return out;
  }
  out.omega_gap = 2.0 * std::sqrt(disc);
  out.phi = std::asin(r / gamma * std::sin(theta));
  out.lambda_plus = r * std::cos(theta) + std::sqrt(disc);
  out.lambda_minus = r * std::cos(theta) - std::sqrt(disc);
  return out;
}

}  // namespace nhqm
