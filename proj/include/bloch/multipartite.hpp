// Bipartite composition in coefficient space.
//
// In a bipartite tensorial frame (factors N_A, N_B, composite N = N_A N_B)
// a coefficient vector splits into three sectors,
//
//   r = d_A r^A (+) d_B r^B (+) d_AB r^AB,
//   d_A = sqrt((N_A-1)/(N-1)),  d_B = sqrt((N_B-1)/(N-1)),
//   d_AB = sqrt((N_A-1)(N_B-1)/(N-1)),
//
// where r^A, r^B are the reduced one-party vectors and r^AB carries the
// correlations.  Product states have r^AB_(k,l) = r^A_k r^B_l; mixtures of
// products average each sector but the AB sector of a mixture is generally
// *not* the outer product of the averaged one-party sectors.  A two-term
// superposition  a_1 |psi_A> (x) |phi_B> + a_2 e^{i alpha} |phi_A> (x) |psi_B>
// adds an interference vector r_int supported on four AB slots:
//
//   r_int(1,1) = r_int(2,2) = sqrt(2) e_N a_1 a_2 cos alpha,
//   r_int(1,2) = -sqrt(2) e_N a_1 a_2 sin alpha,   r_int(2,1) = +sqrt(2) e_N a_1 a_2 sin alpha
//
// in frames whose factor generators are two-level arranged over
// {psi, phi, completion}.  r_int is orthogonal to the rest of the vector and
// to the edge of the in-basis measurement simplex.
//
// The rod experiment realizes singlet correlations sequentially: the first
// party measured at the fully mixed point (weights 1/2, 1/2), the second
// forced to the antipode of the first outcome and then measured against its
// own axis, giving E(a, b) = -a.b per cell construction, independent of
// measurement order.  CHSH combines four axis pairs as
// S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|, reaching 2 sqrt(2) at the
// planar axis set (a, a', b, b') = (0, 90, 45, 135) degrees.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bloch/bloch_map.hpp"
#include "bloch/generators.hpp"
#include "bloch/matrix.hpp"
#include "bloch/measurement.hpp"

namespace bloch {

struct SectorLayout {
  int dim_a = 0;
  int dim_b = 0;

  int n() const { return dim_a * dim_b; }
  int a_count() const { return dim_a * dim_a - 1; }
  int b_count() const { return dim_b * dim_b - 1; }
  int ab_count() const { return a_count() * b_count(); }
  int total() const { return n() * n() - 1; }

  int a_offset() const { return 0; }
  int b_offset() const { return a_count(); }
  int ab_offset() const { return a_count() + b_count(); }
  // Flat index of AB slot (k, l), 1-based inner indices.
  int ab_index(int k, int l) const;

  double d_a() const;
  double d_b() const;
  double d_ab() const;

  // Trace-component values 1/sqrt(N_i - 1) of the factor representations.
  double r0_a() const;
  double r0_b() const;
};

// Layout of a bipartite tensorial basis; rejects bases that are not
// two-factor tensorial.
SectorLayout layout_of(const GeneratorBasis& basis);

// Tensorial frame over canonical standard factor frames (the default
// composite frame used by the CLI and tests).
BasisPtr bipartite_basis(int dim_a, int dim_b);

// Composite vector of the product state decode(ra) (x) decode(rb); ra and rb
// live in the factor frames of `basis` (dimension check only -- the factor
// frames themselves are fixed by basis construction).
BlochVector product_compose(const BlochVector& ra, const BlochVector& rb,
                            const BasisPtr& basis);

struct SectorDecomposition {
  RVector r_a;    // descaled A sector (A slots / d_A)
  RVector r_b;    // descaled B sector
  RVector r_ab;   // descaled AB sector (matrix flattened row-major in (k, l))
  RVector r_int;  // full-length interference remainder (unscaled slots)
};

// Splits a composite vector into sectors.  The interference part of a general
// vector is not identifiable from r alone: when a separable AB reference
// (descaled, length ab_count) is supplied, r_int takes the AB residual
// raw_AB - d_AB * reference; otherwise r_int = 0 and the whole AB content
// stays in r_ab.
SectorDecomposition sector_split(const BlochVector& r, const SectorLayout& layout,
                                 const std::optional<RVector>& separable_ab_reference =
                                     std::nullopt);

// Convex mixture of product states: terms (weight, r_a, r_b); weights
// nonnegative, sum 1 within 1e-12.
BlochVector separable_compose(
    const std::vector<std::tuple<double, BlochVector, BlochVector>>& terms,
    const BasisPtr& basis);

// Two-term superposition a_1 |psi_a>(x)|phi_b> + a_2 e^{i alpha} |phi_a>(x)|psi_b>.
struct EntangledPairSpec {
  double a1 = 0.0;  // nonnegative, a1^2 + a2^2 = 1 within 1e-12
  double a2 = 0.0;
  double alpha = 0.0;
  CVector psi_a, phi_a;  // orthonormal pair in C^{dim_a}
  CVector psi_b, phi_b;  // orthonormal pair in C^{dim_b}
};

EntangledPairSpec make_entangled_pair(double a1, double a2, double alpha,
                                      const CVector& psi_a, const CVector& phi_a,
                                      const CVector& psi_b, const CVector& phi_b);

// The canonical singlet (1/sqrt 2)(|01> - |10>).
EntangledPairSpec singlet_spec();

// The superposed ket / density matrix of a pair spec.
CVector entangled_ket(const EntangledPairSpec& spec);
OperatorState entangled_state(const EntangledPairSpec& spec);

struct EntangledDecomposition {
  BasisPtr basis;         // tensorial frame adapted to the pair (two-level factor frames)
  SectorLayout layout;
  BlochVector full;       // composite coefficient vector of the pure state
  RVector bar_a;          // descaled averaged A sector
  RVector bar_b;
  RVector bar_ab;         // descaled averaged AB sector (no interference)
  RVector r_int;          // full-length interference vector
};

// Analytic sector/interference split of a two-term superposition, computed in
// the frame adapted to {psi, phi} on each side.
EntangledDecomposition entangled_decompose(const EntangledPairSpec& spec);

// Joint outcome probabilities P(i, j) = trace(D (P_i^A (x) P_j^B)) for
// non-degenerate factor observables; rows ascending in A's eigenvalues,
// columns ascending in B's.
Eigen::MatrixXd product_measurement_probs(const OperatorState& d, const CMatrix& obs_a,
                                          const CMatrix& obs_b);

// Singlet correlation E(a, b) = -cos(angle between the axes).
double singlet_expectation(const Eigen::Vector3d& axis_a, const Eigen::Vector3d& axis_b);

struct RodExperimentConfig {
  Eigen::Vector3d axis_a{0.0, 0.0, 1.0};
  Eigen::Vector3d axis_b{0.0, 0.0, 1.0};
  std::int64_t shots = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  bool measure_b_first = false;  // swap the sequential order (results agree)
};

struct RodResult {
  // Cells ordered (++, +-, -+, --), first sign = A outcome, second = B.
  std::array<std::int64_t, 4> counts{};
  std::array<double, 4> analytic{};  // same cells, exact
  double correlation = 0.0;          // empirical E
  double analytic_correlation = 0.0; // -cos(theta)
  std::int64_t shots = 0;
};

RodResult rod_experiment(const RodExperimentConfig& config);

// Exact four-cell table from the sequential mechanism in the given order.
std::array<double, 4> rod_analytic_table(const Eigen::Vector3d& axis_a,
                                         const Eigen::Vector3d& axis_b,
                                         bool measure_b_first);

struct ChshAngles {
  Eigen::Vector3d a, a_prime, b, b_prime;
};

// Planar axis (sin t, 0, cos t) at t degrees, for coplanar CHSH setups.
Eigen::Vector3d planar_axis(double degrees);

// The planar optimum (0, 90, 45, 135) degrees for (a, a', b, b').
ChshAngles optimal_chsh_angles();

double chsh_analytic(const ChshAngles& angles);

struct ChshRun {
  double s = 0.0;
  std::array<double, 4> correlations{};  // E(a,b), E(a,b'), E(a',b), E(a',b')
  std::array<double, 4> analytic{};
  std::array<std::int64_t, 4> shots_per_pair{};
};

// Monte Carlo CHSH through four rod experiments; total shots split evenly
// over the axis pairs, pair p drawing from master seed child_seed(seed, p).
ChshRun chsh_monte_carlo(const ChshAngles& angles, std::int64_t total_shots,
                         std::uint64_t seed, int workers = 1);

struct ParallelProjectionReport {
  double max_deviation = 0.0;  // worst sector mismatch across A and B
  bool pass = false;           // max_deviation <= 1e-10
};

// Checks that projecting the composite vector onto the product-observable
// simplex acts sector-wise: the descaled A (B) sector of the projection
// equals the projection of the descaled A (B) sector onto the factor simplex.
ParallelProjectionReport parallel_sector_projection_check(const OperatorState& d,
                                                          const CMatrix& obs_a,
                                                          const CMatrix& obs_b);

// Full-length permutation that keeps the A and B sectors in place and lists
// the AB sector diagonal-first per block m: (m,m), (1,m)..(m-1,m),
// (m,m-1)..(m,1); defined for square AB grids (dim_a == dim_b).
std::vector<int> diagonal_first_ab_permutation(const SectorLayout& layout);

}  // namespace bloch
