#include "bloch/matrix.hpp"

#include <stdexcept>
#include <string>

namespace bloch {

namespace {

void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square and non-empty, got " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

}  // namespace

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("hs_inner: shape mismatch " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                "x" + std::to_string(b.cols()));
  }
  return (a.adjoint() * b).trace();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double hermiticity_defect(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const CMatrix& a, double tol) {
  return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

SpectralResult eig_hermitian(const CMatrix& a, bool compute_vectors) {
  require_square(a, "eig_hermitian");
  const double defect = hermiticity_defect(a);
  if (defect > HERMITICITY_TOL) {
    throw std::domain_error("eig_hermitian: matrix is not Hermitian (defect " +
                            std::to_string(defect) + ")");
  }
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver;
  solver.compute(sym, compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  }
  SpectralResult res;
  res.eigenvalues = solver.eigenvalues();
  if (compute_vectors) res.eigenvectors = solver.eigenvectors();
  return res;
}

double min_eigenvalue(const CMatrix& a) {
  return eig_hermitian(a, /*compute_vectors=*/false).eigenvalues.minCoeff();
}

CMatrix partial_trace(const CMatrix& m, int dim_a, int dim_b, Subsystem keep) {
  if (dim_a < 1 || dim_b < 1) {
    throw std::invalid_argument("partial_trace: factor dimensions must be positive");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(dim_a) * dim_b;
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("partial_trace: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected " + std::to_string(n) +
                                "x" + std::to_string(n));
  }
  if (keep == Subsystem::A) {
    CMatrix out = CMatrix::Zero(dim_a, dim_a);
    for (int i = 0; i < dim_a; ++i)
      for (int j = 0; j < dim_a; ++j)
        for (int k = 0; k < dim_b; ++k)
          out(i, j) += m(static_cast<Eigen::Index>(i) * dim_b + k,
                         static_cast<Eigen::Index>(j) * dim_b + k);
    return out;
  }
  CMatrix out = CMatrix::Zero(dim_b, dim_b);
  for (int i = 0; i < dim_b; ++i)
    for (int j = 0; j < dim_b; ++j)
      for (int k = 0; k < dim_a; ++k)
        out(i, j) += m(static_cast<Eigen::Index>(k) * dim_b + i,
                       static_cast<Eigen::Index>(k) * dim_b + j);
  return out;
}

}  // namespace bloch
