#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "bloch/bloch_map.hpp"
#include "bloch/interference.hpp"
#include "bloch/measurement.hpp"
#include "oracles.hpp"

using bloch::CMatrix;
using bloch::Complex;
using bloch::CVector;
using bloch::RVector;

namespace {

constexpr double kThird = 2.0 * std::numbers::pi / 3.0;

CVector two_path_ket(int n, double a1, double a2, double alpha) {
  CVector psi = CVector::Zero(n);
  psi(0) = a1;
  psi(1) = a2 * std::exp(Complex(0, alpha));
  return psi;
}

CVector three_path_ket(double a1, double a2, double a3, double alpha, double delta) {
  CVector psi(3);
  psi << Complex(a1, 0), a2 * std::exp(Complex(0, alpha)), a3 * std::exp(Complex(0, delta));
  return psi;
}

// The omega-phased unbiased triple chi_j, j = 1..3.
CVector chi(int j) {
  const Complex omega = std::exp(Complex(0, kThird));
  CVector v(3);
  v << Complex(1, 0), std::pow(omega, j - 1), std::pow(omega, 2 * (j - 1));
  return v / std::sqrt(3.0);
}

}  // namespace

TEST_CASE("two-path probabilities at the cardinal phases") {
  const double inv = 1.0 / std::sqrt(2.0);
  const auto constructive = bloch::interference2(bloch::make_superposition2(2, inv, inv, 0.0));
  CHECK(constructive.probabilities(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(constructive.probabilities(1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(constructive.interference_terms(0) == doctest::Approx(0.5).epsilon(1e-14));

  const auto quadrature =
      bloch::interference2(bloch::make_superposition2(2, inv, inv, std::numbers::pi / 2));
  CHECK(quadrature.probabilities(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(quadrature.interference_terms(0) == doctest::Approx(0.0).epsilon(1e-14));

  const auto destructive =
      bloch::interference2(bloch::make_superposition2(2, inv, inv, std::numbers::pi));
  CHECK(destructive.probabilities(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(destructive.probabilities(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("two-path construction gates") {
  CHECK_THROWS_AS(bloch::make_superposition2(2, 0.9, 0.9, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bloch::make_superposition2(2, -0.6, 0.8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bloch::make_superposition2(1, 1.0, 0.0, 0.0), std::invalid_argument);
  CHECK(bloch::make_superposition2(2, 1.0, 0.0, 0.0).latitude() ==
        doctest::Approx(0.0).epsilon(1e-15));
  const double inv = 1.0 / std::sqrt(2.0);
  CHECK(bloch::make_superposition2(2, inv, inv, 0.3).latitude() ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("two-path report matches the full matrix pipeline everywhere") {
  const auto basis = bloch::standard_basis(2);
  CMatrix coupling = CMatrix::Zero(2, 2);  // eigenvectors are the rotated pair
  coupling(0, 1) = 1;
  coupling(1, 0) = 1;
  const bloch::MeasurementSimplex s = bloch::simplex_from_observable(coupling, basis);

  for (int ia = 1; ia < 20; ++ia) {
    for (int ip = 0; ip < 20; ++ip) {
      const double a1 = ia / 20.0;
      const double a2 = std::sqrt(1.0 - a1 * a1);
      const double alpha = 2.0 * std::numbers::pi * ip / 20.0;
      const auto rep = bloch::interference2(bloch::make_superposition2(2, a1, a2, alpha));

      const CVector psi = two_path_ket(2, a1, a2, alpha);
      const bloch::OperatorState d = bloch::make_state(psi * psi.adjoint());
      const RVector born = bloch::born_probabilities(d, s);
      // Outcome 1 of the simplex is the +1 eigenvector, i.e. the "+" path.
      CHECK(std::abs(rep.probabilities(0) - born(1)) < 1e-13);
      CHECK(std::abs(rep.probabilities(1) - born(0)) < 1e-13);
    }
  }
}

TEST_CASE("three-path fixtures and the sum rules") {
  const double third = 1.0 / std::sqrt(3.0);
  const auto aligned =
      bloch::interference3(bloch::make_superposition3(third, third, third, 0.0, 0.0));
  CHECK(aligned.probabilities(0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(aligned.probabilities(1) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(aligned.probabilities(2) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(aligned.interference_terms(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

  // Phase pattern that funnels everything into the second outcome.
  const auto rotated = bloch::interference3(
      bloch::make_superposition3(third, third, third, kThird, 2.0 * kThird));
  CHECK(rotated.probabilities(0) == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(rotated.probabilities(1) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(rotated.probabilities(2) == doctest::Approx(0.0).epsilon(1e-13));

  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 200; ++trial) {
    const double a1 = unit(rng);
    const double a2 = unit(rng) * std::sqrt(1.0 - a1 * a1);
    const double a3 = std::sqrt(1.0 - a1 * a1 - a2 * a2);
    const auto rep = bloch::interference3(
        bloch::make_superposition3(a1, a2, a3, phase(rng), phase(rng)));
    CHECK(std::abs(rep.interference_terms.sum()) < 1e-14);
    CHECK(rep.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("the six equal-amplitude phase pairs with no interference") {
  const double third = 1.0 / std::sqrt(3.0);
  const double pairs[6][2] = {{0.0, kThird},   {0.0, -kThird},  {kThird, 0.0},
                              {-kThird, 0.0},  {kThird, kThird}, {-kThird, -kThird}};
  for (const auto& p : pairs) {
    const auto rep = bloch::interference3(
        bloch::make_superposition3(third, third, third, p[0], p[1]));
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(rep.interference_terms(j)) < 1e-14);
      CHECK(rep.probabilities(j) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("three-path report equals the transition probabilities to the chi frame") {
  std::mt19937_64 rng(409);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 100; ++trial) {
    const double a1 = unit(rng);
    const double a2 = unit(rng) * std::sqrt(1.0 - a1 * a1);
    const double a3 = std::sqrt(1.0 - a1 * a1 - a2 * a2);
    const double alpha = phase(rng), delta = phase(rng);
    const auto rep =
        bloch::interference3(bloch::make_superposition3(a1, a2, a3, alpha, delta));
    const CVector psi = three_path_ket(a1, a2, a3, alpha, delta);
    for (int j = 1; j <= 3; ++j) {
      const double direct = std::norm(chi(j).dot(psi));
      CHECK(std::abs(rep.probabilities(j - 1) - direct) < 1e-13);
    }
  }
}

TEST_CASE("two-path coefficient vector equals the encoded density matrix") {
  std::mt19937_64 rng(419);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int n = 2; n <= 4; ++n) {
    const auto frame = bloch::two_level_basis(n);
    for (int trial = 0; trial < 20; ++trial) {
      const double a1 = unit(rng);
      const double a2 = std::sqrt(1.0 - a1 * a1);
      const double alpha = phase(rng);
      const auto s = bloch::make_superposition2(n, a1, a2, alpha);
      const bloch::BlochVector closed = bloch::superposition2_vector(s, frame);

      const CVector psi = two_path_ket(n, a1, a2, alpha);
      const bloch::BlochVector encoded =
          bloch::encode(bloch::make_state(psi * psi.adjoint()), frame);
      CHECK((closed.components - encoded.components).cwiseAbs().maxCoeff() < 1e-13);
      CHECK(closed.components.norm() == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  // A frame in the wrong arrangement is rejected.
  const auto s = bloch::make_superposition2(3, 0.6, 0.8, 0.1);
  CHECK_THROWS_AS(bloch::superposition2_vector(s, bloch::standard_basis(3)),
                  std::invalid_argument);
}

TEST_CASE("three-path coefficient vector equals the encoded density matrix") {
  std::mt19937_64 rng(421);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const auto frame = bloch::offdiagonal_first_basis(3);
  for (int trial = 0; trial < 40; ++trial) {
    const double a1 = unit(rng);
    const double a2 = unit(rng) * std::sqrt(1.0 - a1 * a1);
    const double a3 = std::sqrt(1.0 - a1 * a1 - a2 * a2);
    const double alpha = phase(rng), delta = phase(rng);
    const auto s = bloch::make_superposition3(a1, a2, a3, alpha, delta);
    const bloch::BlochVector closed = bloch::superposition3_vector(s, frame);

    const CVector psi = three_path_ket(a1, a2, a3, alpha, delta);
    const bloch::BlochVector encoded =
        bloch::encode(bloch::make_state(psi * psi.adjoint()), frame);
    CHECK((closed.components - encoded.components).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(closed.components.norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(
      bloch::superposition3_vector(bloch::make_superposition3(1, 0, 0, 0, 0),
                                   bloch::standard_basis(3)),
      std::invalid_argument);
}

TEST_CASE("the balanced zero-phase three-path state is the first unbiased vertex") {
  const double third = 1.0 / std::sqrt(3.0);
  const auto frame = bloch::offdiagonal_first_basis(3);
  const bloch::BlochVector v = bloch::superposition3_vector(
      bloch::make_superposition3(third, third, third, 0.0, 0.0), frame);
  const bloch::MubVertices3 mub = bloch::mub_vertices3(frame);
  CHECK((v.components - mub.mub_vertices[0].components).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("unbiased vertex geometry") {
  const auto frame = bloch::offdiagonal_first_basis(3);
  const bloch::MubVertices3 mub = bloch::mub_vertices3(frame);
  REQUIRE(mub.eigen_vertices.size() == 3);
  REQUIRE(mub.mub_vertices.size() == 3);

  const double q = -1.0 / (2.0 * std::sqrt(3.0));
  RVector m2(8);
  m2 << q, -std::sqrt(3.0) * q, q, std::sqrt(3.0) * q, q, -std::sqrt(3.0) * q, 0, 0;
  CHECK((mub.mub_vertices[1].components - m2).cwiseAbs().maxCoeff() < 1e-14);

  for (int i = 0; i < 3; ++i) {
    CHECK(mub.eigen_vertices[i].components.norm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(mub.mub_vertices[i].components.norm() == doctest::Approx(1.0).epsilon(1e-13));
    for (int j = 0; j < 3; ++j) {
      if (i < j) {
        CHECK(mub.eigen_vertices[i].components.dot(mub.eigen_vertices[j].components) ==
              doctest::Approx(-0.5).epsilon(1e-13));
        CHECK(mub.mub_vertices[i].components.dot(mub.mub_vertices[j].components) ==
              doctest::Approx(-0.5).epsilon(1e-13));
      }
      // Unbiasedness: cross dot products vanish (transition weight 1/3).
      CHECK(std::abs(mub.eigen_vertices[i].components.dot(mub.mub_vertices[j].components)) <
            1e-13);
    }
  }

  // The unbiased vertices decode to the projectors on the chi vectors.
  for (int j = 1; j <= 3; ++j) {
    const CMatrix proj = chi(j) * chi(j).adjoint();
    CHECK((bloch::decode(mub.mub_vertices[j - 1]) - proj).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("effective three-coordinate projection of a two-path state") {
  std::mt19937_64 rng(431);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int n : {2, 3, 5}) {
    const double e = bloch::standard_basis(n)->e();
    for (int trial = 0; trial < 10; ++trial) {
      const double a1 = unit(rng);
      const double a2 = std::sqrt(1.0 - a1 * a1);
      const double alpha = phase(rng);
      const auto s = bloch::make_superposition2(n, a1, a2, alpha);
      const bloch::EffectiveProjection eff = bloch::effective_projection(s);
      const auto rep = bloch::interference2(s);

      CHECK(eff.radius == doctest::Approx(e).epsilon(1e-14));
      CHECK(eff.state.norm() == doctest::Approx(e).epsilon(1e-13));
      CHECK(eff.vertex_plus(0) == doctest::Approx(e).epsilon(1e-14));
      CHECK(eff.vertex_minus(0) == doctest::Approx(-e).epsilon(1e-14));
      CHECK(eff.weight_plus == doctest::Approx(rep.probabilities(0)).epsilon(1e-13));
      CHECK(eff.weight_plus + eff.weight_minus == doctest::Approx(1.0).epsilon(1e-14));
      // The first coordinate is the convex interpolation toward the vertices.
      CHECK(eff.state(0) ==
            doctest::Approx(eff.weight_plus * e - eff.weight_minus * e).epsilon(1e-13));

      // It agrees with the leading slots of the full coefficient vector.
      const bloch::BlochVector full =
          bloch::superposition2_vector(s, bloch::two_level_basis(n));
      for (int k = 0; k < 3; ++k) {
        CHECK(eff.state(k) == doctest::Approx(full.components(k)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("decohered latitude grid") {
  const auto frame = bloch::two_level_basis(3);
  const auto s = bloch::make_superposition2(3, 0.8, 0.6, 0.0);
  const std::vector<double> alphas = {0.0, 1.0, 2.5};
  const std::vector<double> taus = {0.0, 0.5, 1.0};
  const auto grid = bloch::latitude_disk(s, frame, alphas, taus);
  REQUIRE(grid.size() == 9);

  for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
    const auto pure = bloch::superposition2_vector(
        bloch::make_superposition2(3, 0.8, 0.6, alphas[ia]), frame);
    for (std::size_t it = 0; it < taus.size(); ++it) {
      const bloch::BlochVector& v = grid[ia * taus.size() + it];
      // Circle slots shrink by 1 - tau; everything else is pinned.
      CHECK(v.components(0) ==
            doctest::Approx((1.0 - taus[it]) * pure.components(0)).epsilon(1e-13));
      CHECK(v.components(1) ==
            doctest::Approx((1.0 - taus[it]) * pure.components(1)).epsilon(1e-13));
      for (int k = 2; k < 8; ++k) {
        CHECK(v.components(k) == doctest::Approx(pure.components(k)).epsilon(1e-13));
      }
      CHECK(bloch::is_state(v));
      if (it > 0) {
        CHECK(bloch::purity(v) <= bloch::purity(grid[ia * taus.size() + it - 1]) + 1e-14);
      }
    }
  }
}
