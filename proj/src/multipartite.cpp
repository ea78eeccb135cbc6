#include "bloch/multipartite.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>

namespace bloch {

namespace {

CVector kron_vec(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
  return out;
}

Eigen::Vector3d unit_axis(const Eigen::Vector3d& axis, const char* who) {
  const double norm = axis.norm();
  if (norm < 1e-12) {
    throw std::invalid_argument(std::string(who) + ": axis has (near-)zero length");
  }
  return axis / norm;
}

// Rank-1 eigenprojectors of a non-degenerate Hermitian observable, ascending.
std::vector<CMatrix> eigenprojectors(const CMatrix& obs, const char* who) {
  const SpectralResult spec = eig_hermitian(obs);
  for (Eigen::Index i = 0; i + 1 < spec.eigenvalues.size(); ++i) {
    if (spec.eigenvalues(i + 1) - spec.eigenvalues(i) <= DEGENERACY_GAP) {
      throw std::domain_error(std::string(who) + ": degenerate observable spectrum");
    }
  }
  std::vector<CMatrix> out;
  out.reserve(spec.eigenvalues.size());
  for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
    const CVector v = spec.eigenvectors.col(i);
    out.push_back(v * v.adjoint());
  }
  return out;
}

void require_bipartite(const BasisPtr& basis, const char* who) {
  if (!basis || basis->kind != BasisKind::Tensorial || basis->factor_dims.size() != 2) {
    throw std::invalid_argument(std::string(who) + ": need a bipartite tensorial basis");
  }
}

}  // namespace

int SectorLayout::ab_index(int k, int l) const {
  if (k < 1 || k > a_count() || l < 1 || l > b_count()) {
    throw std::invalid_argument("SectorLayout::ab_index: inner index out of range");
  }
  return ab_offset() + (k - 1) * b_count() + (l - 1);
}

double SectorLayout::d_a() const { return std::sqrt((dim_a - 1.0) / (n() - 1.0)); }
double SectorLayout::d_b() const { return std::sqrt((dim_b - 1.0) / (n() - 1.0)); }
double SectorLayout::d_ab() const {
  return std::sqrt((dim_a - 1.0) * (dim_b - 1.0) / (n() - 1.0));
}
double SectorLayout::r0_a() const { return 1.0 / std::sqrt(dim_a - 1.0); }
double SectorLayout::r0_b() const { return 1.0 / std::sqrt(dim_b - 1.0); }

SectorLayout layout_of(const GeneratorBasis& basis) {
  if (basis.kind != BasisKind::Tensorial || basis.factor_dims.size() != 2) {
    throw std::invalid_argument("layout_of: basis is not bipartite tensorial");
  }
  return SectorLayout{basis.factor_dims[0], basis.factor_dims[1]};
}

BasisPtr bipartite_basis(int dim_a, int dim_b) {
  return tensorial_basis({standard_basis(dim_a), standard_basis(dim_b)});
}

BlochVector product_compose(const BlochVector& ra, const BlochVector& rb,
                            const BasisPtr& basis) {
  require_bipartite(basis, "product_compose");
  const SectorLayout layout = layout_of(*basis);
  if (ra.components.size() != layout.a_count() || rb.components.size() != layout.b_count()) {
    throw std::invalid_argument("product_compose: factor vector sizes do not match layout");
  }
  RVector out = RVector::Zero(layout.total());
  out.segment(layout.a_offset(), layout.a_count()) = layout.d_a() * ra.components;
  out.segment(layout.b_offset(), layout.b_count()) = layout.d_b() * rb.components;
  const double dab = layout.d_ab();
  for (int k = 1; k <= layout.a_count(); ++k)
    for (int l = 1; l <= layout.b_count(); ++l)
      out(layout.ab_index(k, l)) = dab * ra.components(k - 1) * rb.components(l - 1);
  return BlochVector{std::move(out), basis};
}

SectorDecomposition sector_split(const BlochVector& r, const SectorLayout& layout,
                                 const std::optional<RVector>& separable_ab_reference) {
  if (r.components.size() != layout.total()) {
    throw std::invalid_argument("sector_split: vector length " +
                                std::to_string(r.components.size()) +
                                " does not match layout total " +
                                std::to_string(layout.total()));
  }
  SectorDecomposition out;
  out.r_a = r.components.segment(layout.a_offset(), layout.a_count()) / layout.d_a();
  out.r_b = r.components.segment(layout.b_offset(), layout.b_count()) / layout.d_b();
  const RVector raw_ab = r.components.segment(layout.ab_offset(), layout.ab_count());
  out.r_int = RVector::Zero(layout.total());
  if (separable_ab_reference) {
    if (separable_ab_reference->size() != layout.ab_count()) {
      throw std::invalid_argument("sector_split: reference length does not match AB sector");
    }
    out.r_ab = *separable_ab_reference;
    out.r_int.segment(layout.ab_offset(), layout.ab_count()) =
        raw_ab - layout.d_ab() * out.r_ab;
  } else {
    out.r_ab = raw_ab / layout.d_ab();
  }
  return out;
}

BlochVector separable_compose(
    const std::vector<std::tuple<double, BlochVector, BlochVector>>& terms,
    const BasisPtr& basis) {
  require_bipartite(basis, "separable_compose");
  if (terms.empty()) throw std::invalid_argument("separable_compose: no terms");
  const SectorLayout layout = layout_of(*basis);
  RVector acc = RVector::Zero(layout.total());
  double weight_sum = 0.0;
  for (const auto& [w, ra, rb] : terms) {
    if (w < 0.0) throw std::invalid_argument("separable_compose: negative weight");
    weight_sum += w;
    acc += w * product_compose(ra, rb, basis).components;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("separable_compose: weights sum to " +
                                std::to_string(weight_sum));
  }
  return BlochVector{std::move(acc), basis};
}

EntangledPairSpec make_entangled_pair(double a1, double a2, double alpha,
                                      const CVector& psi_a, const CVector& phi_a,
                                      const CVector& psi_b, const CVector& phi_b) {
  if (a1 < 0.0 || a2 < 0.0) {
    throw std::invalid_argument("make_entangled_pair: amplitudes must be nonnegative");
  }
  if (std::abs(a1 * a1 + a2 * a2 - 1.0) > 1e-12) {
    throw std::invalid_argument("make_entangled_pair: amplitudes are not normalized");
  }
  auto check_pair = [](const CVector& x, const CVector& y, const char* side) {
    if (x.size() != y.size() || x.size() < 2) {
      throw std::invalid_argument(std::string("make_entangled_pair: bad ") + side +
                                  " vector sizes");
    }
    if (std::abs(x.norm() - 1.0) > 1e-10 || std::abs(y.norm() - 1.0) > 1e-10 ||
        std::abs(x.dot(y)) > 1e-10) {
      throw std::invalid_argument(std::string("make_entangled_pair: ") + side +
                                  " pair is not orthonormal");
    }
  };
  check_pair(psi_a, phi_a, "A");
  check_pair(psi_b, phi_b, "B");
  return EntangledPairSpec{a1, a2, alpha, psi_a, phi_a, psi_b, phi_b};
}

EntangledPairSpec singlet_spec() {
  CVector e0(2), e1(2);
  e0 << 1.0, 0.0;
  e1 << 0.0, 1.0;
  const double a = 1.0 / std::sqrt(2.0);
  return make_entangled_pair(a, a, std::numbers::pi, e0, e1, e0, e1);
}

CVector entangled_ket(const EntangledPairSpec& spec) {
  const Complex phase = std::polar(1.0, spec.alpha);
  return spec.a1 * kron_vec(spec.psi_a, spec.phi_b) +
         spec.a2 * phase * kron_vec(spec.phi_a, spec.psi_b);
}

OperatorState entangled_state(const EntangledPairSpec& spec) {
  const CVector ket = entangled_ket(spec);
  return OperatorState{ket * ket.adjoint()};
}

EntangledDecomposition entangled_decompose(const EntangledPairSpec& spec) {
  // Frames adapted to the pair: factor generators two-level arranged over
  // {psi, phi, completion}, so the interference slots are the leading U/V pair.
  const int na = static_cast<int>(spec.psi_a.size());
  const int nb = static_cast<int>(spec.psi_b.size());
  CMatrix partial_a(na, 2), partial_b(nb, 2);
  partial_a.col(0) = spec.psi_a;
  partial_a.col(1) = spec.phi_a;
  partial_b.col(0) = spec.psi_b;
  partial_b.col(1) = spec.phi_b;
  const BasisPtr frame_a =
      reorder(standard_basis(complete_onb(partial_a)), two_level_arrangement(na));
  const BasisPtr frame_b =
      reorder(standard_basis(complete_onb(partial_b)), two_level_arrangement(nb));

  EntangledDecomposition out;
  out.basis = tensorial_basis({frame_a, frame_b});
  out.layout = layout_of(*out.basis);
  out.full = encode(entangled_state(spec), out.basis);

  const RVector ra = encode(OperatorState{spec.psi_a * spec.psi_a.adjoint()}, frame_a).components;
  const RVector sa = encode(OperatorState{spec.phi_a * spec.phi_a.adjoint()}, frame_a).components;
  const RVector rb = encode(OperatorState{spec.psi_b * spec.psi_b.adjoint()}, frame_b).components;
  const RVector sb = encode(OperatorState{spec.phi_b * spec.phi_b.adjoint()}, frame_b).components;

  const double w1 = spec.a1 * spec.a1;
  const double w2 = spec.a2 * spec.a2;
  out.bar_a = w1 * ra + w2 * sa;
  out.bar_b = w1 * sb + w2 * rb;
  out.bar_ab = RVector(out.layout.ab_count());
  for (int k = 1; k <= out.layout.a_count(); ++k)
    for (int l = 1; l <= out.layout.b_count(); ++l)
      out.bar_ab((k - 1) * out.layout.b_count() + (l - 1)) =
          w1 * ra(k - 1) * sb(l - 1) + w2 * sa(k - 1) * rb(l - 1);

  // Interference vector: four AB slots built from the leading U/V generators.
  out.r_int = RVector::Zero(out.layout.total());
  const double amp = std::sqrt(2.0) * out.basis->e() * spec.a1 * spec.a2;
  const double c = std::cos(spec.alpha), s = std::sin(spec.alpha);
  out.r_int(out.layout.ab_index(1, 1)) = amp * c;
  out.r_int(out.layout.ab_index(2, 2)) = amp * c;
  out.r_int(out.layout.ab_index(1, 2)) = -amp * s;
  out.r_int(out.layout.ab_index(2, 1)) = amp * s;
  return out;
}

Eigen::MatrixXd product_measurement_probs(const OperatorState& d, const CMatrix& obs_a,
                                          const CMatrix& obs_b) {
  const auto pa = eigenprojectors(obs_a, "product_measurement_probs");
  const auto pb = eigenprojectors(obs_b, "product_measurement_probs");
  const Eigen::Index n = static_cast<Eigen::Index>(pa.size()) * pb.size();
  if (d.matrix.rows() != n) {
    throw std::invalid_argument("product_measurement_probs: state dimension mismatch");
  }
  Eigen::MatrixXd probs(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) {
      const Complex p = (d.matrix * kron(pa[i], pb[j])).trace();
      if (std::abs(p.imag()) > 1e-10) {
        throw std::domain_error("product_measurement_probs: complex probability residue");
      }
      probs(i, j) = p.real();
    }
  }
  return probs;
}

double singlet_expectation(const Eigen::Vector3d& axis_a, const Eigen::Vector3d& axis_b) {
  return -unit_axis(axis_a, "singlet_expectation").dot(unit_axis(axis_b, "singlet_expectation"));
}

std::array<double, 4> rod_analytic_table(const Eigen::Vector3d& axis_a,
                                         const Eigen::Vector3d& axis_b,
                                         bool measure_b_first) {
  std::array<double, 4> table{};
  for (int sa : {+1, -1}) {
    for (int sb : {+1, -1}) {
      const std::size_t cell = (sa > 0 ? 0 : 2) + (sb > 0 ? 0 : 1);
      double p;
      if (!measure_b_first) {
        // A at the fully mixed point, B forced to the antipode of A's outcome.
        const double dot = unit_axis(axis_a, "rod_analytic_table")
                               .dot(unit_axis(axis_b, "rod_analytic_table"));
        p = 0.5 * (0.5 * (1.0 - sa * sb * dot));
      } else {
        const double dot = unit_axis(axis_b, "rod_analytic_table")
                               .dot(unit_axis(axis_a, "rod_analytic_table"));
        p = 0.5 * (0.5 * (1.0 - sb * sa * dot));
      }
      table[cell] = p;
    }
  }
  return table;
}

RodResult rod_experiment(const RodExperimentConfig& config) {
  if (config.shots < 0) throw std::invalid_argument("rod_experiment: negative shot count");
  if (config.workers < 1) throw std::invalid_argument("rod_experiment: need >= 1 worker");
  const Eigen::Vector3d na = unit_axis(config.axis_a, "rod_experiment");
  const Eigen::Vector3d nb = unit_axis(config.axis_b, "rod_experiment");
  const double dot = config.measure_b_first ? nb.dot(na) : na.dot(nb);

  RodResult result;
  result.shots = config.shots;
  result.analytic = rod_analytic_table(config.axis_a, config.axis_b, config.measure_b_first);
  result.analytic_correlation = -na.dot(nb);

  RVector fair(2);
  fair << 0.5, 0.5;

  std::vector<std::array<std::int64_t, 4>> local(config.workers, std::array<std::int64_t, 4>{});
  auto work = [&](int w) {
    const std::int64_t share =
        config.shots / config.workers + (w < config.shots % config.workers ? 1 : 0);
    RngStream rng(config.seed, static_cast<std::uint64_t>(w));
    auto& cells = local[w];
    RVector forced(2);
    for (std::int64_t k = 0; k < share; ++k) {
      // First party breaks symmetry at the center of its 1-simplex.
      const int first = sample_membrane(fair, rng).outcome == 1 ? +1 : -1;
      // Second party sits at the antipode of the first outcome's vertex; its
      // plus-weight against its own axis is (1 - first * cos theta)/2.
      const double w_plus = 0.5 * (1.0 - first * dot);
      forced << 1.0 - w_plus, w_plus;
      const int second = sample_membrane(forced, rng).outcome == 1 ? +1 : -1;
      const int sa = config.measure_b_first ? second : first;
      const int sb = config.measure_b_first ? first : second;
      cells[(sa > 0 ? 0 : 2) + (sb > 0 ? 0 : 1)]++;
    }
  };
  if (config.workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(config.workers);
    for (int w = 0; w < config.workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& cells : local)
    for (std::size_t i = 0; i < 4; ++i) result.counts[i] += cells[i];

  if (config.shots > 0) {
    const double n = static_cast<double>(config.shots);
    result.correlation = (result.counts[0] - result.counts[1] - result.counts[2] +
                          result.counts[3]) / n;
  }
  return result;
}

Eigen::Vector3d planar_axis(double degrees) {
  const double rad = degrees * std::numbers::pi / 180.0;
  return Eigen::Vector3d(std::sin(rad), 0.0, std::cos(rad));
}

ChshAngles optimal_chsh_angles() {
  return ChshAngles{planar_axis(0.0), planar_axis(90.0), planar_axis(45.0),
                    planar_axis(135.0)};
}

double chsh_analytic(const ChshAngles& angles) {
  return std::abs(singlet_expectation(angles.a, angles.b) -
                  singlet_expectation(angles.a, angles.b_prime) +
                  singlet_expectation(angles.a_prime, angles.b) +
                  singlet_expectation(angles.a_prime, angles.b_prime));
}

ChshRun chsh_monte_carlo(const ChshAngles& angles, std::int64_t total_shots,
                         std::uint64_t seed, int workers) {
  if (total_shots < 0) throw std::invalid_argument("chsh_monte_carlo: negative shot count");
  const std::array<std::pair<Eigen::Vector3d, Eigen::Vector3d>, 4> pairs = {
      std::make_pair(angles.a, angles.b), std::make_pair(angles.a, angles.b_prime),
      std::make_pair(angles.a_prime, angles.b),
      std::make_pair(angles.a_prime, angles.b_prime)};

  ChshRun run;
  for (std::size_t p = 0; p < 4; ++p) {
    RodExperimentConfig cfg;
    cfg.axis_a = pairs[p].first;
    cfg.axis_b = pairs[p].second;
    cfg.shots = total_shots / 4 + (static_cast<std::int64_t>(p) < total_shots % 4 ? 1 : 0);
    cfg.seed = child_seed(seed, p);
    cfg.workers = workers;
    const RodResult rod = rod_experiment(cfg);
    run.correlations[p] = rod.correlation;
    run.analytic[p] = rod.analytic_correlation;
    run.shots_per_pair[p] = cfg.shots;
  }
  run.s = std::abs(run.correlations[0] - run.correlations[1] + run.correlations[2] +
                   run.correlations[3]);
  return run;
}

ParallelProjectionReport parallel_sector_projection_check(const OperatorState& d,
                                                          const CMatrix& obs_a,
                                                          const CMatrix& obs_b) {
  const int na = static_cast<int>(obs_a.rows());
  const int nb = static_cast<int>(obs_b.rows());
  const BasisPtr basis_a = standard_basis(na);
  const BasisPtr basis_b = standard_basis(nb);
  const BasisPtr composite = tensorial_basis({basis_a, basis_b});
  const SectorLayout layout = layout_of(*composite);

  const MeasurementSimplex simplex_a = simplex_from_observable(obs_a, basis_a);
  const MeasurementSimplex simplex_b = simplex_from_observable(obs_b, basis_b);

  // Joint-outcome simplex of the product measurement; its vertices are the
  // encodes of P_i (x) Q_j.  The eigenvalue slots hold the flat outcome index
  // (the composite observable itself may have degenerate sums).
  MeasurementSimplex joint;
  joint.basis = composite;
  joint.n_dim = na * nb;
  joint.eigenvalues = RVector(joint.n_dim);
  joint.projectors.reserve(joint.n_dim);
  joint.vertices.reserve(joint.n_dim);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const int flat = i * nb + j;
      joint.eigenvalues(flat) = flat;
      joint.projectors.push_back(kron(simplex_a.projectors[i], simplex_b.projectors[j]));
      joint.vertices.push_back(encode(OperatorState{joint.projectors.back()}, composite));
    }
  }

  const BlochVector r = encode(d, composite);
  const SimplexProjection joint_proj = project_onto_simplex(r, joint);
  const SectorDecomposition split = sector_split(r, layout);

  const SimplexProjection proj_a = project_onto_simplex(
      BlochVector{split.r_a, basis_a}, simplex_a);
  const SimplexProjection proj_b = project_onto_simplex(
      BlochVector{split.r_b, basis_b}, simplex_b);

  const RVector joint_a =
      joint_proj.parallel.segment(layout.a_offset(), layout.a_count()) / layout.d_a();
  const RVector joint_b =
      joint_proj.parallel.segment(layout.b_offset(), layout.b_count()) / layout.d_b();

  ParallelProjectionReport report;
  report.max_deviation = std::max((joint_a - proj_a.parallel).cwiseAbs().maxCoeff(),
                                  (joint_b - proj_b.parallel).cwiseAbs().maxCoeff());
  report.pass = report.max_deviation <= 1e-10;
  return report;
}

std::vector<int> diagonal_first_ab_permutation(const SectorLayout& layout) {
  if (layout.dim_a != layout.dim_b) {
    throw std::invalid_argument(
        "diagonal_first_ab_permutation: defined for equal factor dimensions");
  }
  std::vector<int> perm;
  perm.reserve(layout.total());
  for (int i = 0; i < layout.ab_offset(); ++i) perm.push_back(i);
  const int k = layout.a_count();
  for (int m = 1; m <= k; ++m) {
    perm.push_back(layout.ab_index(m, m));
    for (int i = 1; i < m; ++i) perm.push_back(layout.ab_index(i, m));
    for (int j = m - 1; j >= 1; --j) perm.push_back(layout.ab_index(m, j));
  }
  return perm;
}

}  // namespace bloch
