#include "bloch/interference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bloch {

namespace {

constexpr double TWO_THIRDS_PI = 2.0 * std::numbers::pi / 3.0;

void require_unit_amplitudes(double norm2, const char* who) {
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw std::invalid_argument(std::string(who) + ": squared amplitudes sum to " +
                                std::to_string(norm2) + ", expected 1");
  }
}

// The closed forms below are slot-positional, so the frame must actually be
// the advertised rearrangement of the canonical standard frame.
void require_arrangement(const BasisPtr& basis, int n, const std::vector<int>& arrangement,
                         const char* who) {
  if (!basis) throw std::invalid_argument(std::string(who) + ": null basis");
  if (basis->n_dim != n) {
    throw std::invalid_argument(std::string(who) + ": basis dimension " +
                                std::to_string(basis->n_dim) + ", state dimension " +
                                std::to_string(n));
  }
  const BasisPtr canonical = standard_basis(n);
  for (std::size_t i = 0; i < arrangement.size(); ++i) {
    const CMatrix& expected = canonical->matrices[arrangement[i]];
    if ((basis->matrices[i] - expected).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::invalid_argument(std::string(who) + ": frame slot " + std::to_string(i) +
                                  " does not match the required arrangement");
    }
  }
}

}  // namespace

double Superposition2::latitude() const { return std::atan2(2.0 * a1 * a2, a1 * a1 - a2 * a2); }

Superposition2 make_superposition2(int n_dim, double a1, double a2, double alpha) {
  if (n_dim < 2) throw std::invalid_argument("make_superposition2: need n_dim >= 2");
  if (a1 < 0.0 || a2 < 0.0) {
    throw std::invalid_argument("make_superposition2: amplitudes must be nonnegative");
  }
  require_unit_amplitudes(a1 * a1 + a2 * a2, "make_superposition2");
  return Superposition2{n_dim, a1, a2, alpha};
}

Superposition3 make_superposition3(double a1, double a2, double a3, double alpha,
                                   double delta) {
  if (a1 < 0.0 || a2 < 0.0 || a3 < 0.0) {
    throw std::invalid_argument("make_superposition3: amplitudes must be nonnegative");
  }
  require_unit_amplitudes(a1 * a1 + a2 * a2 + a3 * a3, "make_superposition3");
  return Superposition3{a1, a2, a3, alpha, delta};
}

InterferenceReport interference2(const Superposition2& s) {
  const double cross = s.a1 * s.a2 * std::cos(s.alpha);
  InterferenceReport rep;
  rep.interference_terms = RVector(2);
  rep.interference_terms << cross, -cross;
  rep.classical = RVector::Constant(2, 0.5);
  rep.probabilities = rep.classical + rep.interference_terms;
  return rep;
}

InterferenceReport interference3(const Superposition3& s) {
  const double g = s.gamma();
  auto band = [&](double shift12, double shift13, double shift23) {
    return (2.0 / 3.0) * (s.a1 * s.a2 * std::cos(s.alpha - shift12) +
                          s.a1 * s.a3 * std::cos(s.delta - shift13) +
                          s.a2 * s.a3 * std::cos(g - shift23));
  };
  InterferenceReport rep;
  rep.interference_terms = RVector(3);
  rep.interference_terms << band(0.0, 0.0, 0.0),
      band(TWO_THIRDS_PI, 2.0 * TWO_THIRDS_PI, TWO_THIRDS_PI),
      band(2.0 * TWO_THIRDS_PI, TWO_THIRDS_PI, 2.0 * TWO_THIRDS_PI);
  rep.classical = RVector::Constant(3, 1.0 / 3.0);
  rep.probabilities = rep.classical + rep.interference_terms;
  return rep;
}

BasisPtr two_level_basis(int n) {
  return reorder(standard_basis(n), two_level_arrangement(n));
}

BasisPtr offdiagonal_first_basis(int n) {
  return reorder(standard_basis(n), offdiagonal_first_arrangement(n));
}

BlochVector superposition2_vector(const Superposition2& s, const BasisPtr& basis) {
  const int n = s.n_dim;
  require_arrangement(basis, n, two_level_arrangement(n), "superposition2_vector");

  RVector r = RVector::Zero(n * n - 1);
  const double e = basis->e();
  r(0) = 2.0 * s.a1 * s.a2 * std::cos(s.alpha);
  r(1) = 2.0 * s.a1 * s.a2 * std::sin(s.alpha);
  r(2) = s.a1 * s.a1 - s.a2 * s.a2;  // W_1
  // W_l for l >= 2 sees both populated levels in its diagonal sum, giving the
  // amplitude-independent chain sqrt(2/(l(l+1))).
  for (int l = 2; l < n; ++l) r(1 + l) = std::sqrt(2.0 / (l * (l + 1.0)));
  return BlochVector{e * r, basis};
}

BlochVector superposition3_vector(const Superposition3& s, const BasisPtr& basis) {
  require_arrangement(basis, 3, offdiagonal_first_arrangement(3), "superposition3_vector");

  const double g = s.gamma();
  RVector r(8);
  r << s.a1 * s.a2 * std::cos(s.alpha), s.a1 * s.a2 * std::sin(s.alpha),
      s.a1 * s.a3 * std::cos(s.delta), s.a1 * s.a3 * std::sin(s.delta),
      s.a2 * s.a3 * std::cos(g), s.a2 * s.a3 * std::sin(g),
      0.5 * (s.a1 * s.a1 - s.a2 * s.a2),
      (s.a1 * s.a1 + s.a2 * s.a2 - 2.0 * s.a3 * s.a3) / (2.0 * std::sqrt(3.0));
  return BlochVector{std::sqrt(3.0) * r, basis};
}

EffectiveProjection effective_projection(const Superposition2& s) {
  const BasisPtr frame = standard_basis(s.n_dim);  // only the constants are needed
  const double e = frame->e();
  EffectiveProjection out;
  out.radius = e;
  out.state = e * Eigen::Vector3d(2.0 * s.a1 * s.a2 * std::cos(s.alpha),
                                  2.0 * s.a1 * s.a2 * std::sin(s.alpha),
                                  s.a1 * s.a1 - s.a2 * s.a2);
  out.vertex_plus = Eigen::Vector3d(e, 0.0, 0.0);
  out.vertex_minus = Eigen::Vector3d(-e, 0.0, 0.0);
  out.weight_plus = 0.5 * (1.0 + 2.0 * s.a1 * s.a2 * std::cos(s.alpha));
  out.weight_minus = 1.0 - out.weight_plus;
  return out;
}

MubVertices3 mub_vertices3(const BasisPtr& basis) {
  require_arrangement(basis, 3, offdiagonal_first_arrangement(3), "mub_vertices3");
  const double s3 = std::sqrt(3.0);

  MubVertices3 out;
  auto push = [&](std::vector<BlochVector>& dst, std::initializer_list<double> values) {
    RVector v(8);
    int i = 0;
    for (double x : values) v(i++) = x;
    dst.push_back(BlochVector{std::move(v), basis});
  };
  // Eigenstate triple: only the diagonal (W) slots are populated.
  push(out.eigen_vertices, {0, 0, 0, 0, 0, 0, s3 / 2.0, 0.5});
  push(out.eigen_vertices, {0, 0, 0, 0, 0, 0, -s3 / 2.0, 0.5});
  push(out.eigen_vertices, {0, 0, 0, 0, 0, 0, 0.0, -1.0});
  // omega-phased triple: only the off-diagonal slots are populated.
  const double u = 1.0 / s3;          // m_1 entries
  const double q = -1.0 / (2.0 * s3); // m_2 / m_3 prefactor
  push(out.mub_vertices, {u, 0, u, 0, u, 0, 0, 0});
  push(out.mub_vertices, {q, -q * s3, q, q * s3, q, -q * s3, 0, 0});
  push(out.mub_vertices, {q, q * s3, q, -q * s3, q, q * s3, 0, 0});
  return out;
}

std::vector<BlochVector> latitude_disk(const Superposition2& s, const BasisPtr& basis,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& taus) {
  for (double tau : taus) {
    if (tau < 0.0 || tau > 1.0) {
      throw std::invalid_argument("latitude_disk: tau must lie in [0, 1]");
    }
  }
  std::vector<BlochVector> out;
  out.reserve(alphas.size() * taus.size());
  for (double alpha : alphas) {
    Superposition2 turned = s;
    turned.alpha = alpha;
    const BlochVector base = superposition2_vector(turned, basis);
    for (double tau : taus) {
      RVector r = base.components;
      r(0) *= 1.0 - tau;
      r(1) *= 1.0 - tau;
      out.push_back(BlochVector{std::move(r), basis});
    }
  }
  return out;
}

}  // namespace bloch
