#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <utility>

#include "nhqm/error.hpp"

namespace nhqm {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kKappaMax = 1e8;        // diagonalizability gate
inline constexpr int kKronCap = 4096;           // Kronecker dimension cap

bool all_finite(const CMat& a);
bool all_finite(const CVec& v);

/// Largest singular value (operator 2-norm).
double op_norm(const CMat& a);
/// 2-norm condition number sigma_max / sigma_min.
double cond2(const CMat& a);
double spectral_radius_upper(const CMat& a);

/// Eigensystem with paired right/left (biorthogonal) vectors.
/// Right vectors are the columns of `right`: unit 2-norm, largest-modulus
/// entry real and positive.  Left vectors (columns of `left`) are the duals,
/// <left_n, right_m> = delta_nm, so sum_n right_n left_n^H = I.
/// Eigenvalues sorted ascending by (Re, Im).
struct EigSystem {
  CVec eigenvalues;
  CMat right;
  CMat left;
  double residual = 0.0;         // max_n ||A e_n - lam_n e_n|| / ||A||
  double frame_condition = 1.0;  // kappa_2 of the right-vector matrix

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  CVec right_vec(int n) const { return right.col(n); }
  CVec left_vec(int n) const { return left.col(n); }
};

/// Scale/phase convention: each column gets unit 2-norm with its
/// largest-modulus entry rotated to the positive real axis.
void canonicalize_columns(CMat& v);

EigSystem eig_general(const CMat& a, double tol = 1e-10, double kappa_max = kKappaMax);

/// Duals of an invertible frame: the conjugated rows of its inverse,
/// returned as columns.  Throws SingularFrame.
CMat dual_basis(const CMat& right, double cond_limit = 1e14);

EigSystem herm_eig(const CMat& hm, double tol_herm = 1e-10);

/// (G^{1/2}, G^{-1/2}) of a Hermitian positive-definite matrix; both outputs
/// are symmetrized.  tol_pd < 0 selects the default 1e-12 * ||G||.
std::pair<CMat, CMat> herm_sqrt(const CMat& g, double tol_pd = -1.0);

/// sum_n f(lambda_n) |e_n><e*_n|
CMat spectral_apply(const EigSystem& sys, const std::function<Complex(Complex)>& f);

/// e^{zA} by Pade scaling-and-squaring.
CMat mat_exp(const CMat& a, Complex z = Complex(1.0, 0.0));
/// e^{zA} through an existing eigensystem.
CMat mat_exp(const EigSystem& sys, Complex z = Complex(1.0, 0.0));

CMat kron(const CMat& a, const CMat& b, int cap = kKronCap);

inline CMat identity(int d) { return CMat::Identity(d, d); }

}  // namespace nhqm
