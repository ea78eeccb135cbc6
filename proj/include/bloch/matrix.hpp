// Dense complex-matrix kernel.
//
// All higher layers speak in terms of N x N complex matrices (observables,
// density operators, basis generators) and real coefficient vectors.  Eigen
// supplies storage and arithmetic; this header pins down the handful of
// operations the rest of the library relies on, together with their error
// contracts:
//
//   hs_inner(a, b)   = trace(a^dagger b)        (Hilbert-Schmidt pairing)
//   kron(a, b)                                  (tensor product, row-major block layout)
//   eig_hermitian(a) = { ascending eigenvalues, orthonormal column eigenvectors }
//   partial_trace    = trace over one factor of an (Na*Nb) x (Na*Nb) matrix
//
// eig_hermitian refuses matrices that are not Hermitian within HERMITICITY_TOL
// and symmetrizes (a + a^dagger)/2 before solving, so callers get real spectra
// even when roundoff has crept into the input.
#pragma once

#include <complex>
#include <Eigen/Dense>

namespace bloch {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Largest tolerated |a - a^dagger| entry before a matrix is rejected as
// non-Hermitian by the spectral routines.
inline constexpr double HERMITICITY_TOL = 1e-10;

struct SpectralResult {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // column i pairs with eigenvalues[i]; empty if not requested
};

// trace(a^dagger b); throws std::invalid_argument on shape mismatch.
Complex hs_inner(const CMatrix& a, const CMatrix& b);

// Tensor (Kronecker) product; (i_a*rows_b + i_b, j_a*cols_b + j_b) = a(i_a,j_a)*b(i_b,j_b).
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Max |a - a^dagger| entry; 0 for the empty matrix.
double hermiticity_defect(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double tol = HERMITICITY_TOL);

// Spectral decomposition of a Hermitian matrix.  Throws std::domain_error if
// the hermiticity defect exceeds HERMITICITY_TOL; otherwise solves the
// symmetrized (a + a^dagger)/2.
SpectralResult eig_hermitian(const CMatrix& a, bool compute_vectors = true);

// Smallest eigenvalue (no eigenvectors computed).
double min_eigenvalue(const CMatrix& a);

enum class Subsystem { A, B };

// Partial trace of m acting on C^{dim_a} (x) C^{dim_b}, keeping the named
// factor.  Index convention matches kron: composite row = i_a*dim_b + i_b.
CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem keep);

}  // namespace bloch
