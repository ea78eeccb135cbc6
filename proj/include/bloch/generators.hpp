// Orthonormal generator bases for the space of traceless Hermitian N x N
// matrices (the su(N) coefficient frames every Bloch vector lives in).
//
// Standard family over an orthonormal basis {b_1..b_N} of C^N:
//
//   U_jk = |b_j><b_k| + |b_k><b_j|                       1 <= j < k <= N
//   V_jk = -i(|b_j><b_k| - |b_k><b_j|)
//   W_l  = sqrt(2/(l(l+1))) (sum_{j<=l} |b_j><b_j| - l |b_{l+1}><b_{l+1}|)
//
// normalized so trace(L_i L_j) = 2 delta_ij.  Canonical order: for k = 2..N
// emit (U_jk, V_jk) for j = 1..k-1, then W_{k-1}; N=2 yields the Pauli triple
// and N=3 the Gell-Mann family in their conventional order, and W_{k-1} sits
// at flat index k^2 - 2.
//
// Tensorial family for a composite C^{N_1} (x) ... (x) C^{N_n}:
//
//   L_(j_1..j_n) = 2^{(1-n)/2} L^{1}_{j_1} (x) ... (x) L^{n}_{j_n},
//   L^{i}_0 = sqrt(2/N_i) I,   excluding the all-zero tuple,
//
// ordered by sector: tuples with one nonzero index first (grouped by factor,
// factor order as given, inner index ascending), then two nonzero indices in
// lexicographic order, and so on.  For a bipartite system this puts the
// A sector, then the B sector, then the correlation sector, matching the
// direct-sum decomposition used by the multipartite layer.
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bloch/matrix.hpp"

namespace bloch {

enum class BasisKind { Standard, Tensorial };

struct GeneratorBasis {
  int n_dim = 0;  // N; the basis holds N^2 - 1 matrices
  BasisKind kind = BasisKind::Standard;
  std::vector<CMatrix> matrices;
  std::vector<std::string> labels;
  std::vector<int> factor_dims;  // {N} for standard, {N_1..N_n} for tensorial

  int count() const { return n_dim * n_dim - 1; }

  // Radius constants of the representation at this N:
  //   c() scales generators into density matrices, D = (I + c r.L)/N;
  //   e() scales coordinates out of traces,        r_i = e tr(D L_i).
  double c() const;  // sqrt(N(N-1)/2)
  double e() const;  // N / (2 c) = sqrt(N / (2(N-1)))
};

// Bases are immutable once built and shared by pointer; coefficient vectors
// tied to the same frame must hold the same pointer.
using BasisPtr = std::shared_ptr<const GeneratorBasis>;

// Canonical standard family over the computational basis of C^n (n >= 2).
BasisPtr standard_basis(int n);

// Standard family over the caller's orthonormal basis, given as the columns
// of onb (unitary N x N within 1e-10, else std::invalid_argument).
BasisPtr standard_basis(const CMatrix& onb);

// Tensorial family built from per-factor standard bases (at least two).
BasisPtr tensorial_basis(const std::vector<BasisPtr>& factors);

struct BasisReport {
  double worst_hermiticity = 0.0;  // max entry of |L - L^dagger| over the family
  double worst_trace = 0.0;        // max |trace L|
  double worst_pair = 0.0;         // max |trace(L_i L_j) - 2 delta_ij|
  bool ok(double tol = 1e-12) const {
    return worst_hermiticity <= tol && worst_trace <= tol && worst_pair <= tol;
  }
};

BasisReport verify_basis(const GeneratorBasis& b);

// New basis with out.matrices[i] = in.matrices[perm[i]]; perm must be a
// permutation of 0..count-1.
BasisPtr reorder(const BasisPtr& b, const std::vector<int>& perm);

// Arrangement adapted to a superposition of the first two basis states:
// [U_12, V_12, W_1 .. W_{n-1}, remaining U/V in canonical order].
std::vector<int> two_level_arrangement(int n);

// All off-diagonal pairs first, diagonal chain last:
// [U_12, V_12, U_13, V_13, ..., U_{n-1,n}, V_{n-1,n}, W_1 .. W_{n-1}].
std::vector<int> offdiagonal_first_arrangement(int n);

// Completes k orthonormal columns (N x k, k <= N) to a full orthonormal basis
// of C^N by Gram-Schmidt against the computational basis.
CMatrix complete_onb(const CMatrix& partial);

}  // namespace bloch
