// Measurement simplexes and the membrane sampling mechanism.
//
// A non-degenerate observable on C^N fixes N rank-1 eigenprojectors P_i whose
// coefficient vectors n_i are unit length with pairwise dot -1/(N-1): the
// vertices of a regular (N-1)-simplex.  A state vector r orthogonally
// projected onto the simplex's affine hull lands at r_par = sum_i w_i n_i,
// and the barycentric weights are exactly the outcome probabilities
//
//   w_i = (1/N) (1 + (N-1) r . n_i) = trace(D P_i).
//
// The sampling mechanism realizes those probabilities geometrically: a point
// lambda is drawn uniformly on the simplex, splitting it into sub-regions
// A_i = hull(r_par, {n_j : j != i}) with relative volume w_i; the outcome is
// the sub-region lambda falls in, characterized by
//
//   lambda in A_i  <=>  lambda_i / w_i = min_j lambda_j / w_j
//
// (zero-weight outcomes excluded; ties, a measure-zero event, resolve to the
// smallest index).  Monte Carlo runs fan shots out over worker threads with
// streams derived per rng.hpp, so counts are reproducible from
// (seed, workers) regardless of scheduling.
#pragma once

#include <cstdint>
#include <vector>

#include "bloch/bloch_map.hpp"
#include "bloch/generators.hpp"
#include "bloch/matrix.hpp"
#include "bloch/rng.hpp"

namespace bloch {

// Smallest eigenvalue gap accepted by simplex_from_observable.
inline constexpr double DEGENERACY_GAP = 1e-8;

struct MeasurementSimplex {
  BasisPtr basis;
  int n_dim = 0;
  RVector eigenvalues;               // ascending; outcome i belongs to eigenvalues[i]
  std::vector<CMatrix> projectors;   // rank-1 eigenprojectors, same order
  std::vector<BlochVector> vertices; // encode(P_i)
};

// Spectral decomposition of a Hermitian observable into a simplex.  Throws
// std::domain_error if any adjacent eigenvalue gap is <= DEGENERACY_GAP
// (degenerate observables have no unique rank-1 decomposition).
MeasurementSimplex simplex_from_observable(const CMatrix& observable, const BasisPtr& basis);

struct SimplexProjection {
  RVector weights;     // affine weights on the vertices, sum 1
  RVector parallel;    // r_par coefficients, = sum_i weights[i] * n_i
  RVector transverse;  // r - r_par, orthogonal to the affine hull
};

// Orthogonal projection onto the affine hull of the vertices, solved through
// the Gram normal equations of the N-1 edge directions n_i - n_N.  Weights of
// bona fide states are Born probabilities (nonnegative); inputs outside the
// state region may produce genuinely negative weights, which are returned
// unclamped.
SimplexProjection project_onto_simplex(const BlochVector& r, const MeasurementSimplex& s);

// p_i = (1/N)(1 + (N-1) r . n_i) for r = encode(d).
RVector born_probabilities(const OperatorState& d, const MeasurementSimplex& s);

// Straight-line decoherence path r_tau = (1 - tau) r + tau r_par, tau in [0, 1].
BlochVector immersion_path(const BlochVector& r, const MeasurementSimplex& s, double tau);

struct MembraneOutcome {
  int outcome = -1;  // index into the simplex vertices
  RVector lambda;    // the uniform simplex point that decided it
};

// One draw of the mechanism for the given weights (size N, each >= -1e-12
// with tiny negatives clamped, sum 1 within 1e-10).  lambda is drawn as N
// unit exponentials normalized, which is uniform on the simplex.
MembraneOutcome sample_membrane(const RVector& weights, RngStream& rng);

struct MeasurementRun {
  RVector analytic;                  // Born probabilities
  std::vector<std::int64_t> counts;  // per outcome, sum == shots
  RVector empirical;                 // counts / shots
  std::vector<CMatrix> collapsed;    // post-outcome states (the projectors)
  std::int64_t shots = 0;
  int workers = 1;
  std::uint64_t seed = 0;
};

// Monte Carlo run: shots split as evenly as possible over workers (worker w
// takes shots/workers plus one of the first shots%workers remainders), each
// worker drawing from RngStream(seed, w).
MeasurementRun run_measurement(const OperatorState& d, const MeasurementSimplex& s,
                               std::int64_t shots, std::uint64_t seed, int workers = 1);

// Relative volume of sub-region A_i, which the mechanism makes equal to the
// outcome weight itself (for N=3: absolute area = weights[i] * 3*sqrt(3)/4).
double subregion_fraction(const RVector& weights, int outcome);

// Uniform point on the (n-1)-simplex (n nonnegative coordinates, sum 1).
RVector sample_simplex_uniform(int n, RngStream& rng);

}  // namespace bloch
