#pragma once

#include "nhqm/paraops.hpp"

namespace nhqm {

struct MeasurementOutcome {
  Complex expectation;
  RVec probabilities;
  CVec basis_labels;  // eigenvalues, same order as probabilities
  MetricOp context;
};

/// Non-Hermitian Born expectation <psi, G^{1/2} A G^{-1/2} psi> / ||psi||^2.
Complex expect(const CMat& a, const MetricOp& g, const CVec& psi);

/// Usual Born rule <psi, A psi> / ||psi||^2 (identity measurement context;
/// not physical for non-Hermitian A).
Complex expect_naive(const CMat& a, const CVec& psi);

/// Discrete expectation and transition probabilities
/// p_n = |<e*_n, G^{-1/2} psi>|^2 / ||psi||^2 with G = sum |e*_n><e*_n|.
MeasurementOutcome expect_discrete(const EigSystem& sys, const CVec& psi);

/// Biorthogonal expectation <psi~, T psi> / <psi~, psi>,
/// psi~ = sum_n <e*_n, psi> e*_n.
Complex biorthogonal_expect(const CMat& t, const EigSystem& sys, const CVec& psi);

/// For Hermitian A with a valid metric G: |<A>_{psi,G} - <A>_psi| <= tol.
bool hermitian_consistency(const CMat& a, const MetricOp& g, const CVec& psi, double tol);

}  // namespace nhqm
