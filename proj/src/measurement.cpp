#include "bloch/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace bloch {

namespace {

void require_same_basis(const BasisPtr& a, const BasisPtr& b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": basis mismatch");
}

// Validates a weight vector for the sampler: clamps tiny negatives, rejects
// real ones, checks normalization.
RVector checked_weights(const RVector& weights, const char* who) {
  const int n = static_cast<int>(weights.size());
  if (n < 2) throw std::invalid_argument(std::string(who) + ": need at least two outcomes");
  RVector w = weights;
  for (int i = 0; i < n; ++i) {
    if (w(i) < -1e-12) {
      throw std::invalid_argument(std::string(who) + ": negative weight " +
                                  std::to_string(w(i)) + " at outcome " + std::to_string(i));
    }
    if (w(i) < 0.0) w(i) = 0.0;
  }
  if (std::abs(w.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument(std::string(who) + ": weights sum to " +
                                std::to_string(w.sum()));
  }
  return w;
}

}  // namespace

MeasurementSimplex simplex_from_observable(const CMatrix& observable, const BasisPtr& basis) {
  if (!basis) throw std::invalid_argument("simplex_from_observable: null basis");
  if (observable.rows() != basis->n_dim) {
    throw std::invalid_argument("simplex_from_observable: observable dimension " +
                                std::to_string(observable.rows()) +
                                " does not match basis n_dim " +
                                std::to_string(basis->n_dim));
  }
  const SpectralResult spec = eig_hermitian(observable);
  const int n = basis->n_dim;
  for (int i = 0; i + 1 < n; ++i) {
    const double gap = spec.eigenvalues(i + 1) - spec.eigenvalues(i);
    if (gap <= DEGENERACY_GAP) {
      throw std::domain_error("simplex_from_observable: degenerate spectrum (gap " +
                              std::to_string(gap) + " between outcomes " + std::to_string(i) +
                              " and " + std::to_string(i + 1) + ")");
    }
  }

  MeasurementSimplex s;
  s.basis = basis;
  s.n_dim = n;
  s.eigenvalues = spec.eigenvalues;
  s.projectors.reserve(n);
  s.vertices.reserve(n);
  for (int i = 0; i < n; ++i) {
    const CVector v = spec.eigenvectors.col(i);
    s.projectors.push_back(v * v.adjoint());
    s.vertices.push_back(encode(OperatorState{s.projectors.back()}, basis));
  }

  // Construction sanity: vertices must form a regular simplex in the frame.
  const double expected_dot = -1.0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    if (std::abs(s.vertices[i].components.norm() - 1.0) > 1e-12) {
      throw std::runtime_error("simplex_from_observable: vertex " + std::to_string(i) +
                               " is not unit length");
    }
    for (int j = i + 1; j < n; ++j) {
      const double dot = s.vertices[i].components.dot(s.vertices[j].components);
      if (std::abs(dot - expected_dot) > 1e-10) {
        throw std::runtime_error("simplex_from_observable: vertex dot (" + std::to_string(i) +
                                 "," + std::to_string(j) + ") deviates from -1/(N-1)");
      }
    }
  }
  return s;
}

SimplexProjection project_onto_simplex(const BlochVector& r, const MeasurementSimplex& s) {
  require_same_basis(r.basis, s.basis, "project_onto_simplex");
  const int n = s.n_dim;
  const Eigen::Index dim = r.components.size();

  // Affine hull through n_N spanned by edges d_i = n_i - n_N, i = 1..N-1;
  // normal equations G t = rhs with G the edge Gram matrix.
  Eigen::MatrixXd edges(dim, n - 1);
  const RVector& anchor = s.vertices[n - 1].components;
  for (int i = 0; i < n - 1; ++i) edges.col(i) = s.vertices[i].components - anchor;
  const Eigen::MatrixXd gram = edges.transpose() * edges;
  const RVector rhs = edges.transpose() * (r.components - anchor);
  const RVector t = Eigen::LLT<Eigen::MatrixXd>(gram).solve(rhs);

  SimplexProjection out;
  out.weights = RVector(n);
  out.weights.head(n - 1) = t;
  out.weights(n - 1) = 1.0 - t.sum();
  out.parallel = anchor + edges * t;
  out.transverse = r.components - out.parallel;
  return out;
}

RVector born_probabilities(const OperatorState& d, const MeasurementSimplex& s) {
  const BlochVector r = encode(d, s.basis);
  const int n = s.n_dim;
  RVector p(n);
  for (int i = 0; i < n; ++i) {
    p(i) = (1.0 + (n - 1) * r.components.dot(s.vertices[i].components)) / n;
  }
  return p;
}

BlochVector immersion_path(const BlochVector& r, const MeasurementSimplex& s, double tau) {
  if (tau < 0.0 || tau > 1.0) {
    throw std::invalid_argument("immersion_path: tau must lie in [0, 1], got " +
                                std::to_string(tau));
  }
  const SimplexProjection proj = project_onto_simplex(r, s);
  return BlochVector{(1.0 - tau) * r.components + tau * proj.parallel, r.basis};
}

RVector sample_simplex_uniform(int n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_simplex_uniform: n must be positive");
  RVector lambda(n);
  for (int i = 0; i < n; ++i) lambda(i) = rng.exponential();
  return lambda / lambda.sum();
}

MembraneOutcome sample_membrane(const RVector& weights, RngStream& rng) {
  const RVector w = checked_weights(weights, "sample_membrane");
  const int n = static_cast<int>(w.size());

  MembraneOutcome out;
  out.lambda = sample_simplex_uniform(n, rng);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (w(i) <= 0.0) continue;  // zero-weight sub-regions have no volume
    const double ratio = out.lambda(i) / w(i);
    if (ratio < best) {  // strict: ties stay with the smaller index
      best = ratio;
      out.outcome = i;
    }
  }
  if (out.outcome < 0) throw std::invalid_argument("sample_membrane: all weights are zero");
  return out;
}

MeasurementRun run_measurement(const OperatorState& d, const MeasurementSimplex& s,
                               std::int64_t shots, std::uint64_t seed, int workers) {
  if (shots < 0) throw std::invalid_argument("run_measurement: negative shot count");
  if (workers < 1) throw std::invalid_argument("run_measurement: need at least one worker");

  MeasurementRun run;
  run.analytic = born_probabilities(d, s);
  run.shots = shots;
  run.workers = workers;
  run.seed = seed;
  run.collapsed = s.projectors;

  const int n = s.n_dim;
  const RVector weights = checked_weights(run.analytic, "run_measurement");

  std::vector<std::vector<std::int64_t>> local(workers, std::vector<std::int64_t>(n, 0));
  auto work = [&](int w) {
    const std::int64_t share = shots / workers + (w < shots % workers ? 1 : 0);
    RngStream rng(seed, static_cast<std::uint64_t>(w));
    auto& counts = local[w];
    for (std::int64_t k = 0; k < share; ++k) {
      counts[static_cast<std::size_t>(sample_membrane(weights, rng).outcome)]++;
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  run.counts.assign(n, 0);
  for (const auto& counts : local)
    for (int i = 0; i < n; ++i) run.counts[i] += counts[i];

  run.empirical = RVector::Zero(n);
  if (shots > 0) {
    for (int i = 0; i < n; ++i) {
      run.empirical(i) = static_cast<double>(run.counts[i]) / static_cast<double>(shots);
    }
  }
  return run;
}

double subregion_fraction(const RVector& weights, int outcome) {
  const RVector w = checked_weights(weights, "subregion_fraction");
  if (outcome < 0 || outcome >= w.size()) {
    throw std::invalid_argument("subregion_fraction: outcome index out of range");
  }
  return w(outcome);
}

}  // namespace bloch
