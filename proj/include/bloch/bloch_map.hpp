// Mapping between density operators and real coefficient vectors.
//
// With a generator frame {L_i} for C^N and the radius constants
// c = sqrt(N(N-1)/2), e = N/(2c), a unit-trace Hermitian D corresponds to
//
//   encode:  r_i = e * trace(D L_i)          (real up to roundoff)
//   decode:  D   = (I + c * sum_i r_i L_i) / N
//
// decode(encode(D)) reproduces D exactly for any unit-trace Hermitian input.
// Norms mean purity: trace(D^2) = 1/N + (1 - 1/N)|r|^2, so |r| = 1 exactly on
// the rank-1 projectors.  For N > 2 the unit ball is strictly larger than the
// state region -- decode of a unit vector need not be positive -- so validity
// is checked spectrally (is_state), never by the norm alone.
#pragma once

#include <utility>
#include <vector>

#include "bloch/generators.hpp"
#include "bloch/matrix.hpp"

namespace bloch {

// Default tolerance for state validation (hermiticity, unit trace, and how
// far below zero the smallest eigenvalue may sit).
inline constexpr double STATE_TOL = 1e-10;

// A validated density operator: Hermitian, unit trace, positive semidefinite
// within STATE_TOL.  Construct through make_state.
struct OperatorState {
  CMatrix matrix;
};

OperatorState make_state(const CMatrix& m, double tol = STATE_TOL);

// Real coefficient vector tied to the frame it was computed in.  Operations
// combining two vectors require the same frame (same BasisPtr object).
struct BlochVector {
  RVector components;
  BasisPtr basis;
};

BlochVector make_bloch_vector(RVector components, BasisPtr basis);

// r_i = e * trace(D L_i); throws std::domain_error if any coefficient has
// imaginary residue above 1e-10 (a symptom of a broken frame).
BlochVector encode(const OperatorState& d, const BasisPtr& basis);

// (I + c r.L)/N -- always Hermitian with unit trace, not necessarily positive.
CMatrix decode(const BlochVector& r);

// trace(decode(r)^2) computed from the norm alone.
double purity(const BlochVector& r);

// True iff decode(r) is positive semidefinite within tol.
bool is_state(const BlochVector& r, double tol = STATE_TOL);

// Weighted sum of vectors sharing one frame; weights must be nonnegative and
// sum to 1 within 1e-12.
BlochVector convex_combine(const std::vector<std::pair<double, BlochVector>>& terms);

// Qubit density matrix at spherical coordinates (0 <= radius <= 1):
// D = (I + radius * (sin t cos p, sin t sin p, cos t) . sigma) / 2.
OperatorState qubit_from_spherical(double radius, double theta, double phi);

}  // namespace bloch
