// Interference of two- and three-path superpositions in coefficient space.
//
// For psi = a_1 b_1 + a_2 e^{i alpha} b_2 in C^N, probabilities toward the
// rotated pair chi_pm = (b_1 pm b_2)/sqrt(2) split into a uniform classical
// part and an interference contribution:
//
//   P_pm = 1/2 (1 pm 2 a_1 a_2 cos alpha) = 1/2 + I_pm,  I_pm = pm a_1 a_2 cos alpha.
//
// For psi = a_1 b_1 + a_2 e^{i alpha} b_2 + a_3 e^{i delta} b_3 in C^3 and the
// mutually unbiased frame chi_j built from the cube roots of unity
// (omega = e^{2 pi i/3}), with gamma = delta - alpha:
//
//   I_1 = 2/3 [a_1 a_2 cos alpha          + a_1 a_3 cos delta            + a_2 a_3 cos gamma]
//   I_2 = 2/3 [a_1 a_2 cos(alpha - 2pi/3) + a_1 a_3 cos(delta - 4pi/3)   + a_2 a_3 cos(gamma - 2pi/3)]
//   I_3 = 2/3 [a_1 a_2 cos(alpha - 4pi/3) + a_1 a_3 cos(delta - 2pi/3)   + a_2 a_3 cos(gamma - 4pi/3)]
//
//   P(F_j) = 1/3 (1 + 3 I_j) = 1/3 + I_j,   I_1 + I_2 + I_3 = 0.
//
// Coefficient vectors are written in rearranged standard frames: the
// two-level arrangement [U_12, V_12, W-chain, rest] for 2-path states, and
// the off-diagonal-first arrangement for 3-path states.  Operations receive
// the frame explicitly and reject one whose leading slots do not match the
// expected arrangement (the closed forms below are slot-positional).
#pragma once

#include <vector>

#include "bloch/bloch_map.hpp"
#include "bloch/generators.hpp"

namespace bloch {

struct Superposition2 {
  int n_dim = 2;      // ambient dimension N >= 2
  double a1 = 0.0;    // nonnegative amplitudes, a1^2 + a2^2 = 1 within 1e-12
  double a2 = 0.0;
  double alpha = 0.0; // relative phase

  // Latitude angle of the state on the effective sphere: cos = a1^2 - a2^2.
  double latitude() const;
};

Superposition2 make_superposition2(int n_dim, double a1, double a2, double alpha);

struct Superposition3 {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;  // nonnegative, unit norm within 1e-12
  double alpha = 0.0, delta = 0.0;      // phases of paths 2 and 3

  double gamma() const { return delta - alpha; }
};

Superposition3 make_superposition3(double a1, double a2, double a3, double alpha,
                                   double delta);

struct InterferenceReport {
  RVector probabilities;       // P_j, nonnegative, sum 1
  RVector interference_terms;  // I_j, sum 0
  RVector classical;           // the I = 0 baseline (uniform 1/N_outcomes)
};

InterferenceReport interference2(const Superposition2& s);
InterferenceReport interference3(const Superposition3& s);

// Standard frame of C^n rearranged as [U_12, V_12, W_1..W_{n-1}, rest].
BasisPtr two_level_basis(int n);

// Standard frame of C^n rearranged as [all U/V pairs, then W_1..W_{n-1}].
BasisPtr offdiagonal_first_basis(int n);

// Coefficient vector of psi = a_1 b_1 + a_2 e^{i alpha} b_2 in a two-level
// arranged frame:  e_N (2 a1 a2 cos alpha, 2 a1 a2 sin alpha, a1^2 - a2^2,
// 1/sqrt(3), ..., sqrt(2/(N(N-1))), 0, ..., 0).
BlochVector superposition2_vector(const Superposition2& s, const BasisPtr& basis);

// Coefficient vector of the 3-path state in the off-diagonal-first frame:
// sqrt(3) (a1 a2 cos alpha, a1 a2 sin alpha, a1 a3 cos delta, a1 a3 sin delta,
//          a2 a3 cos gamma, a2 a3 sin gamma,
//          (a1^2 - a2^2)/2, (a1^2 + a2^2 - 2 a3^2)/(2 sqrt 3)).
BlochVector superposition3_vector(const Superposition3& s, const BasisPtr& basis);

// The three live coordinates of a 2-path state collapsed to a 3-vector of
// length e_N, together with the images of the chi_pm vertices on that axis
// and the convex weights toward them (the interference probabilities).
struct EffectiveProjection {
  Eigen::Vector3d state;         // (2a1a2 cos alpha, 2a1a2 sin alpha, a1^2-a2^2) * e_N
  Eigen::Vector3d vertex_plus;   // (+e_N, 0, 0)
  Eigen::Vector3d vertex_minus;  // (-e_N, 0, 0)
  double radius = 0.0;           // e_N
  double weight_plus = 0.0;      // 1/2 (1 + 2 a1 a2 cos alpha)
  double weight_minus = 0.0;
};

EffectiveProjection effective_projection(const Superposition2& s);

// Vertex vectors of the two mutually unbiased N=3 measurements in the
// off-diagonal-first frame: the eigenstate triple b_j and the omega-phased
// triple chi_j = (b_1 + omega^{j-1} b_2 + omega^{2(j-1)} b_3)/sqrt(3).
struct MubVertices3 {
  std::vector<BlochVector> eigen_vertices;  // n_1, n_2, n_3
  std::vector<BlochVector> mub_vertices;    // m_1, m_2, m_3
};

MubVertices3 mub_vertices3(const BasisPtr& basis);

// Decohered latitude grid: for each alpha and each tau the vector r_tau(alpha)
// whose circle slots (0, 1) are scaled by (1 - tau), all other slots fixed.
// Result is alpha-major: out[i * taus.size() + j] pairs alphas[i] with taus[j].
std::vector<BlochVector> latitude_disk(const Superposition2& s, const BasisPtr& basis,
                                       const std::vector<double>& alphas,
                                       const std::vector<double>& taus);

}  // namespace bloch
