#include "nhqm/born.hpp"

#include <cmath>

namespace nhqm {

namespace {

double norm2_checked(const CVec& psi, const char* who) {
  if (!all_finite(psi)) fail(Errc::NumericalFailure, std::string(who) + ": non-finite state");
  double n2 = psi.squaredNorm();
  if (n2 <= 0.0) fail(Errc::ZeroState, std::string(who) + ": zero state");
  return n2;
}

}  // namespace

Complex expect(const CMat& a, const MetricOp& g, const CVec& psi) {
  if (a.rows() != psi.size() || g.dim() != psi.size())
    fail(Errc::DimensionMismatch, "expect: dimension mismatch");
  double n2 = norm2_checked(psi, "expect");
  CVec w = g.inv_sqrt * psi;
  return psi.dot(g.sqrt * (a * w)) / n2;
}

Complex expect_naive(const CMat& a, const CVec& psi) {
  if (a.rows() != psi.size()) fail(Errc::DimensionMismatch, "expect_naive: dimension mismatch");
  double n2 = norm2_checked(psi, "expect_naive");
  return psi.dot(a * psi) / n2;
}

MeasurementOutcome expect_discrete(const EigSystem& sys, const CVec& psi) {
  const int d = sys.dim();
  if (psi.size() != d) fail(Errc::DimensionMismatch, "expect_discrete: dimension mismatch");
  double n2 = norm2_checked(psi, "expect_discrete");

  double rho = 0.0;
  for (int k = 0; k < d; ++k) rho = std::max(rho, std::abs(sys.eigenvalues(k)));
  double tol_spec = 1e-8 * std::max(1.0, rho);
  for (int k = 0; k < d; ++k)
    if (std::abs(sys.eigenvalues(k).imag()) > tol_spec)
      fail(Errc::ComplexSpectrum, "expect_discrete: spectrum is not real",
           {{"max_im", std::abs(sys.eigenvalues(k).imag())}});

  MeasurementOutcome out;
  out.context = metric_from_eigensystem(sys);
  out.basis_labels = sys.eigenvalues;
  CVec w = out.context.inv_sqrt * psi;
  out.probabilities.resize(d);
  Complex acc(0, 0);
  double total = 0.0;
  for (int k = 0; k < d; ++k) {
    double p = std::norm(sys.left.col(k).dot(w)) / n2;
    out.probabilities(k) = p;
    total += p;
    acc += sys.eigenvalues(k) * p;
  }
  // roundoff hygiene: renormalize only a tiny deficit, otherwise report failure
  if (std::abs(total - 1.0) > 1e-10 * std::max(1.0, sys.frame_condition))
    fail(Errc::NumericalFailure, "expect_discrete: probabilities do not sum to one",
         {{"sum", total}, {"kappa", sys.frame_condition}});
  out.probabilities /= total;
  out.expectation = acc / total;
  return out;
}

Complex biorthogonal_expect(const CMat& t, const EigSystem& sys, const CVec& psi) {
  const int d = sys.dim();
  if (psi.size() != d || t.rows() != d)
    fail(Errc::DimensionMismatch, "biorthogonal_expect: dimension mismatch");
  norm2_checked(psi, "biorthogonal_expect");
  CVec a = sys.left.adjoint() * psi;      // a_n = <e*_n, psi>
  CVec psi_tilde = sys.left * a;          // sum_n a_n e*_n
  Complex den = psi_tilde.dot(psi);
  if (std::abs(den) <= 1e-12 * psi_tilde.norm() * psi.norm())
    fail(Errc::DegenerateOverlap, "biorthogonal_expect: <psi~, psi> vanishes",
         {{"overlap", std::abs(den)}});
  return psi_tilde.dot(t * psi) / den;
}

bool hermitian_consistency(const CMat& a, const MetricOp& g, const CVec& psi, double tol) {
  if (tol <= 0.0) fail(Errc::DomainError, "hermitian_consistency: tol must be positive");
  double na = op_norm(a);
  if (op_norm(a - a.adjoint()) > 1e-10 * std::max(na, 1.0))
    fail(Errc::NotHermitian, "hermitian_consistency: A is not Hermitian");
  if (!is_metric_for(g, a, 1e-8))
    fail(Errc::NotAMetric, "hermitian_consistency: G is not a metric for A");
  Complex lhs = expect(a, g, psi);
  Complex rhs = expect_naive(a, psi);
  return std::abs(lhs - rhs) <= tol;
}

}  // namespace nhqm
