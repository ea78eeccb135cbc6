#include "oracles.hpp"

#include <algorithm>
#include <complex>
#include <stdexcept>

namespace oracle {

namespace {

using Poly = std::vector<double>;  // coefficients, leading power first

double eval(const Poly& p, double x) {
  double acc = 0.0;
  for (double c : p) acc = acc * x + c;
  return acc;
}

// Running magnitude bound for eval(p, x); used to decide whether a value is
// "zero" relative to the size of the terms that produced it.
double eval_scale(const Poly& p, double x) {
  const double ax = std::abs(x);
  double acc = 0.0;
  for (double c : p) acc = acc * ax + std::abs(c);
  return acc;
}

Poly derivative(const Poly& p) {
  const int deg = static_cast<int>(p.size()) - 1;
  Poly d(deg);
  for (int i = 0; i < deg; ++i) d[i] = p[i] * (deg - i);
  return d;
}

double cauchy_bound(const Poly& p) {
  double m = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) m = std::max(m, std::abs(p[i] / p[0]));
  return 1.0 + m;
}

double bisect(const Poly& p, double a, double b, double fa) {
  for (int it = 0; it < 160; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = eval(p, mid);
    if (fm == 0.0) return mid;
    if ((fa < 0.0) == (fm < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// All roots of a polynomial known to have only real roots, with multiplicity.
// Critical points are found recursively; by interlacing, each gap between
// consecutive critical points (padded by an outer bound) holds exactly one
// root.
void real_roots(const Poly& p, std::vector<double>& out) {
  const int deg = static_cast<int>(p.size()) - 1;
  if (deg <= 0) return;
  if (deg == 1) {
    out.push_back(-p[1] / p[0]);
    return;
  }
  std::vector<double> crit;
  real_roots(derivative(p), crit);
  std::sort(crit.begin(), crit.end());

  const double bound = cauchy_bound(p);
  std::vector<double> pts;
  pts.reserve(crit.size() + 2);
  pts.push_back(-bound);
  pts.insert(pts.end(), crit.begin(), crit.end());
  pts.push_back(bound);

  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double b = pts[i + 1];
    if (a == b) {
      out.push_back(a);
      continue;
    }
    const double fa = eval(p, a);
    const double fb = eval(p, b);
    const double za = 1e-11 * eval_scale(p, a);
    const double zb = 1e-11 * eval_scale(p, b);
    if (std::abs(fa) <= za && std::abs(fa) <= std::abs(fb)) {
      out.push_back(a);
    } else if (std::abs(fb) <= zb) {
      out.push_back(b);
    } else if ((fa < 0.0) != (fb < 0.0)) {
      out.push_back(bisect(p, a, b, fa));
    } else {
      // Real-rootedness guarantees a root here; the residuals were just too
      // large for the zero test. Take the endpoint with the smaller residual.
      out.push_back(std::abs(fa) < std::abs(fb) ? a : b);
    }
  }
}

using Dense = std::vector<std::complex<double>>;  // row-major n x n

Dense multiply(const Dense& a, const Dense& b, int n) {
  Dense c(static_cast<std::size_t>(n) * n, {0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const std::complex<double> aik = a[i * n + k];
      for (int j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  }
  return c;
}

double trace_real(const Dense& a, int n) {
  double t = 0.0;
  for (int i = 0; i < n; ++i) t += a[i * n + i].real();
  return t;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const bloch::CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.cols() != n) throw std::invalid_argument("need a square matrix");

  Dense base(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) base[i * n + j] = m(i, j);
  }

  // Power sums tr(M^k), then Newton's identities for the elementary symmetric
  // polynomials e_k; the characteristic polynomial is sum_k (-1)^k e_k x^(n-k).
  std::vector<double> power(n + 1, 0.0);
  Dense acc = base;
  power[1] = trace_real(acc, n);
  for (int k = 2; k <= n; ++k) {
    acc = multiply(acc, base, n);
    power[k] = trace_real(acc, n);
  }
  std::vector<double> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0;
    for (int i = 1; i <= k; ++i) {
      sum += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * power[i];
    }
    e[k] = sum / k;
  }

  Poly poly(n + 1);
  for (int k = 0; k <= n; ++k) poly[k] = (k % 2 == 0 ? 1.0 : -1.0) * e[k];

  std::vector<double> roots;
  roots.reserve(n);
  real_roots(poly, roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

namespace {

double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < 800; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

double gamma_q_continued_fraction(double s, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 800; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double regularized_gamma_q(double s, double x) {
  if (s <= 0.0 || x < 0.0) throw std::invalid_argument("bad incomplete gamma arguments");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_continued_fraction(s, x);
}

double chi_square_pvalue(double stat, int dof) {
  return regularized_gamma_q(0.5 * dof, 0.5 * stat);
}

double chi_square_stat(const std::vector<std::int64_t>& counts,
                       const std::vector<double>& expected_probs) {
  if (counts.size() != expected_probs.size()) {
    throw std::invalid_argument("count/probability size mismatch");
  }
  std::int64_t total = 0;
  for (std::int64_t c : counts) total += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = expected_probs[i] * static_cast<double>(total);
    if (expected <= 0.0) {
      if (counts[i] != 0) throw std::invalid_argument("counts in a zero-probability bin");
      continue;
    }
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

double shoelace_area(const std::vector<Vec2>& polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(twice);
}

int triangle_side(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c,
                  double margin) {
  const Vec2 verts[3] = {a, b, c};
  bool inside = true;
  bool outside = false;
  for (int i = 0; i < 3; ++i) {
    const Vec2& u = verts[i];
    const Vec2& v = verts[(i + 1) % 3];
    const Vec2& w = verts[(i + 2) % 3];
    const double edge = std::hypot(v.x - u.x, v.y - u.y);
    if (edge == 0.0) return 0;
    const double side_p = cross(u, v, p) / edge;   // signed distance of p
    const double side_w = cross(u, v, w) / edge;   // signed distance of far vertex
    if (std::abs(side_p) < margin) return 0;
    if ((side_p < 0.0) != (side_w < 0.0)) {
      inside = false;
      outside = true;
    }
  }
  if (inside) return 1;
  return outside ? -1 : 0;
}

bloch::CMatrix random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  bloch::CMatrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = bloch::Complex(gauss(rng), gauss(rng));
  }
  return 0.5 * (a + a.adjoint());
}

bloch::CMatrix random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  bloch::CMatrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = bloch::Complex(gauss(rng), gauss(rng));
  }
  bloch::CMatrix d = g * g.adjoint();
  return d / d.trace().real();
}

bloch::CVector random_ket(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  bloch::CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = bloch::Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace oracle
