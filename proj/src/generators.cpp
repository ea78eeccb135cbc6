#include "bloch/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bloch {

namespace {

constexpr Complex kI{0.0, 1.0};

std::string uv_label(char kind, int j, int k) {
  return std::string(1, kind) + "(" + std::to_string(j) + "," + std::to_string(k) + ")";
}

std::string tuple_label(const std::vector<int>& tuple) {
  std::string s = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(tuple[i]);
  }
  return s + ")";
}

void require_unitary(const CMatrix& onb) {
  const CMatrix gram = onb.adjoint() * onb;
  const double defect =
      (gram - CMatrix::Identity(onb.cols(), onb.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw std::invalid_argument("standard_basis: columns are not orthonormal (defect " +
                                std::to_string(defect) + ")");
  }
}

}  // namespace

double GeneratorBasis::c() const { return std::sqrt(0.5 * n_dim * (n_dim - 1)); }

double GeneratorBasis::e() const { return n_dim / (2.0 * c()); }

BasisPtr standard_basis(int n) {
  if (n < 2) throw std::invalid_argument("standard_basis: need n >= 2");
  return standard_basis(CMatrix::Identity(n, n));
}

BasisPtr standard_basis(const CMatrix& onb) {
  if (onb.rows() < 2 || onb.rows() != onb.cols()) {
    throw std::invalid_argument("standard_basis: onb must be square with n >= 2");
  }
  require_unitary(onb);
  const int n = static_cast<int>(onb.rows());

  auto basis = std::make_shared<GeneratorBasis>();
  basis->n_dim = n;
  basis->kind = BasisKind::Standard;
  basis->factor_dims = {n};
  basis->matrices.reserve(n * n - 1);
  basis->labels.reserve(n * n - 1);

  auto proj = [&](int j, int k) -> CMatrix {  // |b_j><b_k|, 1-based
    return onb.col(j - 1) * onb.col(k - 1).adjoint();
  };

  for (int k = 2; k <= n; ++k) {
    for (int j = 1; j < k; ++j) {
      basis->matrices.push_back(proj(j, k) + proj(k, j));
      basis->labels.push_back(uv_label('U', j, k));
      basis->matrices.push_back(-kI * (proj(j, k) - proj(k, j)));
      basis->labels.push_back(uv_label('V', j, k));
    }
    const int l = k - 1;
    CMatrix w = CMatrix::Zero(n, n);
    for (int m = 1; m <= l; ++m) w += proj(m, m);
    w -= static_cast<double>(l) * proj(k, k);
    basis->matrices.push_back(std::sqrt(2.0 / (l * (l + 1.0))) * w);
    basis->labels.push_back("W(" + std::to_string(l) + ")");
  }
  return basis;
}

BasisPtr tensorial_basis(const std::vector<BasisPtr>& factors) {
  if (factors.size() < 2) {
    throw std::invalid_argument("tensorial_basis: need at least two factors");
  }
  for (const auto& f : factors) {
    if (!f) throw std::invalid_argument("tensorial_basis: null factor basis");
  }
  const int n_factors = static_cast<int>(factors.size());

  // Every index tuple (j_1..j_n), j_i in [0, N_i^2 - 1], except all zeros;
  // sector order: fewer nonzero slots first, then nonzero-slot positions,
  // then the tuple itself, all lexicographic.
  std::vector<std::vector<int>> tuples;
  std::vector<int> tuple(n_factors, 0);
  for (;;) {
    int idx = n_factors - 1;
    while (idx >= 0) {
      if (++tuple[idx] < factors[idx]->count() + 1) break;
      tuple[idx] = 0;
      --idx;
    }
    if (idx < 0) break;
    tuples.push_back(tuple);
  }
  auto sector_key = [](const std::vector<int>& t) {
    std::vector<int> positions;
    for (int i = 0; i < static_cast<int>(t.size()); ++i)
      if (t[i] != 0) positions.push_back(i);
    return positions;
  };
  std::sort(tuples.begin(), tuples.end(),
            [&](const std::vector<int>& a, const std::vector<int>& b) {
              const auto pa = sector_key(a), pb = sector_key(b);
              if (pa.size() != pb.size()) return pa.size() < pb.size();
              if (pa != pb) return pa < pb;
              return a < b;
            });

  double prefactor = 1.0;  // 2^{(1-n)/2}
  for (int i = 1; i < n_factors; ++i) prefactor /= std::sqrt(2.0);

  auto basis = std::make_shared<GeneratorBasis>();
  basis->kind = BasisKind::Tensorial;
  basis->n_dim = 1;
  for (const auto& f : factors) {
    basis->factor_dims.push_back(f->n_dim);
    basis->n_dim *= f->n_dim;
  }
  basis->matrices.reserve(tuples.size());
  basis->labels.reserve(tuples.size());

  for (const auto& t : tuples) {
    CMatrix m = CMatrix::Identity(1, 1);
    for (int i = 0; i < n_factors; ++i) {
      const int ni = factors[i]->n_dim;
      const CMatrix& factor_matrix =
          t[i] == 0 ? CMatrix(std::sqrt(2.0 / ni) * CMatrix::Identity(ni, ni))
                    : factors[i]->matrices[t[i] - 1];
      m = kron(m, factor_matrix);
    }
    basis->matrices.push_back(prefactor * m);
    basis->labels.push_back(tuple_label(t));
  }
  return basis;
}

BasisReport verify_basis(const GeneratorBasis& b) {
  BasisReport report;
  const int count = static_cast<int>(b.matrices.size());
  for (int i = 0; i < count; ++i) {
    const CMatrix& m = b.matrices[i];
    report.worst_hermiticity = std::max(report.worst_hermiticity, hermiticity_defect(m));
    report.worst_trace = std::max(report.worst_trace, std::abs(m.trace()));
    for (int j = i; j < count; ++j) {
      const double target = i == j ? 2.0 : 0.0;
      const double dev = std::abs((m * b.matrices[j]).trace() - target);
      report.worst_pair = std::max(report.worst_pair, dev);
    }
  }
  return report;
}

BasisPtr reorder(const BasisPtr& b, const std::vector<int>& perm) {
  if (!b) throw std::invalid_argument("reorder: null basis");
  const int count = b->count();
  if (static_cast<int>(perm.size()) != count) {
    throw std::invalid_argument("reorder: permutation has " + std::to_string(perm.size()) +
                                " entries, basis has " + std::to_string(count));
  }
  std::vector<bool> seen(count, false);
  for (int p : perm) {
    if (p < 0 || p >= count || seen[p]) {
      throw std::invalid_argument("reorder: not a permutation of 0.." +
                                  std::to_string(count - 1));
    }
    seen[p] = true;
  }
  auto out = std::make_shared<GeneratorBasis>();
  out->n_dim = b->n_dim;
  out->kind = b->kind;
  out->factor_dims = b->factor_dims;
  out->matrices.reserve(count);
  out->labels.reserve(count);
  for (int i = 0; i < count; ++i) {
    out->matrices.push_back(b->matrices[perm[i]]);
    out->labels.push_back(b->labels[perm[i]]);
  }
  return out;
}

std::vector<int> two_level_arrangement(int n) {
  if (n < 2) throw std::invalid_argument("two_level_arrangement: need n >= 2");
  std::vector<int> perm = {0, 1};
  for (int k = 2; k <= n; ++k) perm.push_back(k * k - 2);  // W_{k-1}
  std::vector<bool> used(n * n - 1, false);
  for (int p : perm) used[p] = true;
  for (int i = 0; i < n * n - 1; ++i)
    if (!used[i]) perm.push_back(i);
  return perm;
}

std::vector<int> offdiagonal_first_arrangement(int n) {
  if (n < 2) throw std::invalid_argument("offdiagonal_first_arrangement: need n >= 2");
  std::vector<int> perm;
  for (int k = 2; k <= n; ++k) {
    const int block_start = (k - 1) * (k - 1) - 1;
    for (int j = 1; j < k; ++j) {
      perm.push_back(block_start + 2 * (j - 1));
      perm.push_back(block_start + 2 * (j - 1) + 1);
    }
  }
  for (int k = 2; k <= n; ++k) perm.push_back(k * k - 2);
  return perm;
}

CMatrix complete_onb(const CMatrix& partial) {
  const int n = static_cast<int>(partial.rows());
  const int k = static_cast<int>(partial.cols());
  if (k > n || k < 1) throw std::invalid_argument("complete_onb: need 1 <= cols <= rows");
  require_unitary(partial);

  CMatrix out(n, n);
  out.leftCols(k) = partial;
  int have = k;
  for (int i = 0; i < n && have < n; ++i) {
    CVector v = CVector::Zero(n);
    v(i) = 1.0;
    // Two Gram-Schmidt passes keep orthogonality near machine precision even
    // when e_i is nearly inside the current span.
    for (int pass = 0; pass < 2; ++pass)
      for (int c = 0; c < have; ++c) v -= out.col(c).dot(v) * out.col(c);
    const double norm = v.norm();
    if (norm > 1e-8) {
      out.col(have++) = v / norm;
    }
  }
  if (have != n) throw std::runtime_error("complete_onb: completion failed");
  return out;
}

}  // namespace bloch
