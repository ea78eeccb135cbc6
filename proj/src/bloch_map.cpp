#include "bloch/bloch_map.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bloch {

OperatorState make_state(const CMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw std::invalid_argument("make_state: need a square matrix with n >= 2");
  }
  const double herm = hermiticity_defect(m);
  if (herm > tol) {
    throw std::domain_error("make_state: not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const double trace_defect = std::abs(m.trace() - Complex(1.0));
  if (trace_defect > tol) {
    throw std::domain_error("make_state: trace differs from 1 by " +
                            std::to_string(trace_defect));
  }
  const double lo = min_eigenvalue(m);
  if (lo < -tol) {
    throw std::domain_error("make_state: negative eigenvalue " + std::to_string(lo));
  }
  return OperatorState{m};
}

BlochVector make_bloch_vector(RVector components, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("make_bloch_vector: null basis");
  if (components.size() != basis->count()) {
    throw std::invalid_argument("make_bloch_vector: " + std::to_string(components.size()) +
                                " components for a basis of " +
                                std::to_string(basis->count()));
  }
  return BlochVector{std::move(components), std::move(basis)};
}

BlochVector encode(const OperatorState& d, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("encode: null basis");
  if (d.matrix.rows() != basis->n_dim) {
    throw std::invalid_argument("encode: state dimension " + std::to_string(d.matrix.rows()) +
                                " does not match basis n_dim " +
                                std::to_string(basis->n_dim));
  }
  const double e = basis->e();
  RVector r(basis->count());
  for (int i = 0; i < basis->count(); ++i) {
    const Complex coeff = e * (d.matrix * basis->matrices[i]).trace();
    if (std::abs(coeff.imag()) > 1e-10) {
      throw std::domain_error("encode: coefficient " + std::to_string(i) +
                              " has imaginary residue " + std::to_string(coeff.imag()));
    }
    r(i) = coeff.real();
  }
  return BlochVector{std::move(r), basis};
}

CMatrix decode(const BlochVector& r) {
  if (!r.basis) throw std::invalid_argument("decode: vector has no basis");
  if (r.components.size() != r.basis->count()) {
    throw std::invalid_argument("decode: component count does not match basis");
  }
  const int n = r.basis->n_dim;
  CMatrix m = CMatrix::Identity(n, n);
  const double c = r.basis->c();
  for (int i = 0; i < r.basis->count(); ++i) {
    if (r.components(i) != 0.0) m += (c * r.components(i)) * r.basis->matrices[i];
  }
  return m / static_cast<double>(n);
}

double purity(const BlochVector& r) {
  const double n = r.basis ? r.basis->n_dim : 0;
  if (n < 2) throw std::invalid_argument("purity: vector has no valid basis");
  return 1.0 / n + (1.0 - 1.0 / n) * r.components.squaredNorm();
}

bool is_state(const BlochVector& r, double tol) {
  return min_eigenvalue(decode(r)) >= -tol;
}

BlochVector convex_combine(const std::vector<std::pair<double, BlochVector>>& terms) {
  if (terms.empty()) throw std::invalid_argument("convex_combine: no terms");
  const BasisPtr& basis = terms.front().second.basis;
  if (!basis) throw std::invalid_argument("convex_combine: vector has no basis");
  double weight_sum = 0.0;
  RVector acc = RVector::Zero(basis->count());
  for (const auto& [w, v] : terms) {
    if (w < 0.0) throw std::invalid_argument("convex_combine: negative weight");
    if (v.basis != basis) throw std::invalid_argument("convex_combine: basis mismatch");
    weight_sum += w;
    acc += w * v.components;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("convex_combine: weights sum to " +
                                std::to_string(weight_sum));
  }
  return BlochVector{std::move(acc), basis};
}

OperatorState qubit_from_spherical(double radius, double theta, double phi) {
  if (radius < 0.0 || radius > 1.0 + 1e-12) {
    throw std::invalid_argument("qubit_from_spherical: radius must lie in [0, 1]");
  }
  const double x = radius * std::sin(theta) * std::cos(phi);
  const double y = radius * std::sin(theta) * std::sin(phi);
  const double z = radius * std::cos(theta);
  CMatrix m(2, 2);
  m << Complex(0.5 * (1.0 + z), 0.0), Complex(0.5 * x, -0.5 * y),
      Complex(0.5 * x, 0.5 * y), Complex(0.5 * (1.0 - z), 0.0);
  return OperatorState{m};
}

}  // namespace bloch
