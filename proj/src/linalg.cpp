#include "nhqm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace nhqm {

namespace {

void require_square(const CMat& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1)
    fail(Errc::DimensionMismatch, std::string(who) + ": square matrix of dim >= 1 required");
  if (!all_finite(a)) fail(Errc::NumericalFailure, std::string(who) + ": non-finite entries");
}

}  // namespace

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonDiagonalizable: return "NonDiagonalizable";
    case Errc::NumericalFailure: return "NumericalFailure";
    case Errc::SingularFrame: return "SingularFrame";
    case Errc::NotHermitian: return "NotHermitian";
    case Errc::NotPositiveDefinite: return "NotPositiveDefinite";
    case Errc::DomainError: return "DomainError";
    case Errc::DimensionOverflow: return "DimensionOverflow";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroState: return "ZeroState";
    case Errc::ComplexSpectrum: return "ComplexSpectrum";
    case Errc::DegenerateOverlap: return "DegenerateOverlap";
    case Errc::NotAMetric: return "NotAMetric";
    case Errc::SingularEta: return "SingularEta";
    case Errc::BrokenRegime: return "BrokenRegime";
    case Errc::NotParaHermitian: return "NotParaHermitian";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::NoCycleFound: return "NoCycleFound";
    case Errc::BadGauge: return "BadGauge";
    case Errc::NotInFiber: return "NotInFiber";
    case Errc::NotCyclic: return "NotCyclic";
    case Errc::GridParseError: return "GridParseError";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool all_finite(const CMat& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
  return true;
}

bool all_finite(const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

double op_norm(const CMat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(a);
  return svd.singularValues()(0);
}

double cond2(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a);
  const auto& s = svd.singularValues();
  double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

double spectral_radius_upper(const CMat& a) {
  // cheap bound, enough for scale-aware tolerances
  return std::min(a.cwiseAbs().rowwise().sum().maxCoeff(),
                  a.cwiseAbs().colwise().sum().maxCoeff());
}

void canonicalize_columns(CMat& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    double nrm = v.col(j).norm();
    if (nrm == 0.0) fail(Errc::SingularFrame, "canonicalize_columns: zero column");
    v.col(j) /= nrm;
    // first entry whose modulus ties the maximum (within 1e-12 relative)
    double mx = 0.0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) mx = std::max(mx, std::abs(v(i, j)));
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) >= mx * (1.0 - 1e-12)) { pick = i; break; }
    }
    Complex p = v(pick, j);
    v.col(j) *= std::conj(p) / std::abs(p);
  }
}

CMat dual_basis(const CMat& right, double cond_limit) {
  require_square(right, "dual_basis");
  double c = cond2(right);
  if (!std::isfinite(c) || c > cond_limit)
    fail(Errc::SingularFrame, "dual_basis: frame matrix singular within tolerance",
         {{"cond", c}});
  Eigen::PartialPivLU<CMat> lu(right);
  CMat inv = lu.inverse();
  return inv.adjoint();
}

EigSystem eig_general(const CMat& a, double tol, double kappa_max) {
  require_square(a, "eig_general");
  if (tol <= 0.0) fail(Errc::DomainError, "eig_general: tol must be positive");
  const int d = static_cast<int>(a.rows());

  Eigen::ComplexEigenSolver<CMat> solver(a, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    fail(Errc::NumericalFailure, "eig_general: QR iteration did not converge");

  CVec lam = solver.eigenvalues();
  CMat vec = solver.eigenvectors();

  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) {
    if (lam(i).real() != lam(j).real()) return lam(i).real() < lam(j).real();
    return lam(i).imag() < lam(j).imag();
  });

  EigSystem sys;
  sys.eigenvalues.resize(d);
  sys.right.resize(d, d);
  for (int k = 0; k < d; ++k) {
    sys.eigenvalues(k) = lam(idx[k]);
    sys.right.col(k) = vec.col(idx[k]);
  }
  canonicalize_columns(sys.right);

  sys.frame_condition = cond2(sys.right);
  if (!std::isfinite(sys.frame_condition) || sys.frame_condition > kappa_max)
    fail(Errc::NonDiagonalizable,
         "eig_general: right-eigenvector matrix condition number exceeds the gate",
         {{"kappa", sys.frame_condition}, {"kappa_max", kappa_max}});

  sys.left = dual_basis(sys.right);

  double na = op_norm(a);
  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    worst = std::max(worst, (a * sys.right.col(k) - sys.eigenvalues(k) * sys.right.col(k)).norm());
  sys.residual = (na > 0.0) ? worst / na : worst;
  return sys;
}

EigSystem herm_eig(const CMat& hm, double tol_herm) {
  require_square(hm, "herm_eig");
  double nh = op_norm(hm);
  double defect = op_norm(hm - hm.adjoint());
  if (defect > tol_herm * std::max(nh, 1.0))
    fail(Errc::NotHermitian, "herm_eig: input is not Hermitian within tolerance",
         {{"defect", defect}, {"norm", nh}});

  CMat sym = 0.5 * (hm + hm.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> solver(sym);
  if (solver.info() != Eigen::Success)
    fail(Errc::NumericalFailure, "herm_eig: eigensolver did not converge");

  const int d = static_cast<int>(hm.rows());
  EigSystem sys;
  sys.eigenvalues.resize(d);
  for (int k = 0; k < d; ++k) sys.eigenvalues(k) = Complex(solver.eigenvalues()(k), 0.0);
  sys.right = solver.eigenvectors();
  canonicalize_columns(sys.right);
  sys.left = sys.right;
  sys.frame_condition = 1.0;
  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    worst = std::max(worst, (sym * sys.right.col(k) - sys.eigenvalues(k) * sys.right.col(k)).norm());
  sys.residual = (nh > 0.0) ? worst / nh : worst;
  return sys;
}

std::pair<CMat, CMat> herm_sqrt(const CMat& g, double tol_pd) {
  EigSystem sys = herm_eig(g);
  double gmax = sys.eigenvalues.real().maxCoeff();
  if (tol_pd < 0.0) tol_pd = 1e-12 * std::max(gmax, 1.0);
  double gmin = sys.eigenvalues.real().minCoeff();
  if (gmin <= tol_pd)
    fail(Errc::NotPositiveDefinite, "herm_sqrt: minimum eigenvalue below the gate",
         {{"min_eig", gmin}, {"tol_pd", tol_pd}});

  const int d = sys.dim();
  CVec rt(d), rti(d);
  for (int k = 0; k < d; ++k) {
    double s = std::sqrt(sys.eigenvalues(k).real());
    rt(k) = Complex(s, 0.0);
    rti(k) = Complex(1.0 / s, 0.0);
  }
  CMat s = sys.right * rt.asDiagonal() * sys.right.adjoint();
  CMat si = sys.right * rti.asDiagonal() * sys.right.adjoint();
  s = 0.5 * (s + s.adjoint()).eval();
  si = 0.5 * (si + si.adjoint()).eval();
  return {s, si};
}

CMat spectral_apply(const EigSystem& sys, const std::function<Complex(Complex)>& f) {
  const int d = sys.dim();
  CVec fv(d);
  for (int k = 0; k < d; ++k) fv(k) = f(sys.eigenvalues(k));
  return sys.right * fv.asDiagonal() * sys.left.adjoint();
}

CMat mat_exp(const EigSystem& sys, Complex z) {
  return spectral_apply(sys, [z](Complex lam) { return std::exp(z * lam); });
}

// Pade(13) scaling-and-squaring, Higham 2005.
CMat mat_exp(const CMat& a, Complex z) {
  require_square(a, "mat_exp");
  const int d = static_cast<int>(a.rows());
  CMat m = z * a;
  double nrm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (!std::isfinite(nrm)) fail(Errc::NumericalFailure, "mat_exp: overflow in input scaling");

  static const double theta13 = 5.371920351148152;
  int squarings = 0;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    m /= std::pow(2.0, squarings);
  }

  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const CMat ident = CMat::Identity(d, d);
  const CMat m2 = m * m;
  const CMat m4 = m2 * m2;
  const CMat m6 = m4 * m2;
  CMat u = m * (m6 * (b[13] * m6 + b[11] * m4 + b[9] * m2) +
                b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * ident);
  CMat v = m6 * (b[12] * m6 + b[10] * m4 + b[8] * m2) +
           b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * ident;

  Eigen::PartialPivLU<CMat> lu(v - u);
  CMat r = lu.solve(v + u);
  for (int k = 0; k < squarings; ++k) r = (r * r).eval();
  if (!all_finite(r)) fail(Errc::NumericalFailure, "mat_exp: overflow");
  return r;
}

CMat kron(const CMat& a, const CMat& b, int cap) {
  require_square(a, "kron");
  require_square(b, "kron");
  const Eigen::Index da = a.rows(), db = b.rows();
  if (da * db > cap)
    fail(Errc::DimensionOverflow, "kron: output dimension exceeds the cap",
         {{"dim", double(da * db)}, {"cap", double(cap)}});
  CMat out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a(i, j) * b;
  return out;
}

}  // namespace nhqm
