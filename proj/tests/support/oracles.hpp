#pragma once

// Reference computations for the tests. They work from matrices and
// definitions directly and never call the library routine they check.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "geoqm/lie.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

inline Mat2 sigma(int k) {
  Mat2 m;
  const cplx i(0.0, 1.0);
  switch (k) {
    case 1: m << 0.0, 1.0, 1.0, 0.0; break;
    case 2: m << 0.0, -i, i, 0.0; break;
    default: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

inline Mat2 sigma_dot(const Vec3& v) { return v.x() * sigma(1) + v.y() * sigma(2) + v.z() * sigma(3); }

/// sum_k a_k (i/2) sigma_k
inline Mat2 algebra_matrix(const Vec3& a) { return cplx(0.0, 0.5) * sigma_dot(a); }

/// (1/2) Tr(X Y^dagger)
inline double killing(const Mat2& x, const Mat2& y) { return 0.5 * (x * y.adjoint()).trace().real(); }

inline double killing(const Vec3& a, const Vec3& b) { return killing(algebra_matrix(a), algebra_matrix(b)); }

/// Coordinates of an su(2) matrix by projection on the basis with the trace form.
inline Vec3 algebra_coords(const Mat2& m) {
  Vec3 a;
  for (int k = 1; k <= 3; ++k) a[k - 1] = killing(m, algebra_matrix(Vec3::Unit(k - 1))) / 0.25;
  return a;
}

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

/// exp((i/hbar) mu t sigma.B) by the general matrix exponential.
inline Eigen::Vector2cd evolve(const Eigen::Vector2cd& phi0, const Vec3& B, double mu, double hbar, double t) {
  const Mat2 gen = cplx(0.0, mu * t / hbar) * sigma_dot(B);
  const Mat2 u = gen.exp();
  return u * phi0;
}

/// <sigma_k> = psi^dagger sigma_k psi
inline Vec3 sigma_expectation(const Eigen::Vector2cd& psi) {
  Vec3 e;
  for (int k = 1; k <= 3; ++k) e[k - 1] = psi.dot(sigma(k) * psi).real();
  return e;
}

inline Eigen::Vector2cd vec(const geoqm::Spinor& s) { return {s.c1, s.c2}; }

/// Curvature of the 2-plane span(X, Y) in su(2), measured from the length of
/// a geodesic circle of radius r on the unit sphere S^3 in R^4 = C^2.
/// Tangent vectors at the identity are the top rows of the su(2) matrices,
/// whose Euclidean norm equals the Killing norm. Solves
/// C(r) = 2 pi sin(sqrt(K) r) / sqrt(K) for K by Newton iteration.
inline double circle_curvature(const Vec3& x, const Vec3& y, double r = 0.5, int samples = 64) {
  auto top = [](const Vec3& a) {
    const Mat2 m = algebra_matrix(a);
    return Eigen::Vector4d(m(0, 0).real(), m(0, 0).imag(), m(0, 1).real(), m(0, 1).imag());
  };
  const Eigen::Vector4d p(1.0, 0.0, 0.0, 0.0);
  Eigen::Vector4d u = top(x);
  Eigen::Vector4d v = top(y);
  u.normalize();
  v -= v.dot(u) * u;
  v.normalize();
  // Points at geodesic distance r; the curve is a planar Euclidean circle,
  // so its length is 2 pi times its Euclidean radius about the centroid.
  std::vector<Eigen::Vector4d> pts;
  Eigen::Vector4d centre = Eigen::Vector4d::Zero();
  for (int k = 0; k < samples; ++k) {
    const double a = 2.0 * M_PI * k / samples;
    const Eigen::Vector4d w = std::cos(a) * u + std::sin(a) * v;
    pts.push_back(std::cos(r) * p + std::sin(r) * w);
    centre += pts.back();
  }
  centre /= samples;
  double rho = 0.0;
  for (const auto& q : pts) rho += (q - centre).norm();
  rho /= samples;
  const double c = 2.0 * M_PI * rho;
  double k = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double s = std::sqrt(k);
    const double f = 2.0 * M_PI * std::sin(s * r) / s - c;
    const double df = 2.0 * M_PI * (r * std::cos(s * r) / (2.0 * k) - std::sin(s * r) / (2.0 * k * s));
    const double step = f / df;
    k -= step;
    if (std::abs(step) < 1e-15) break;
  }
  return k;
}

inline geoqm::Spinor random_spinor(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  for (;;) {
    const double a = g(rng), b = g(rng), c = g(rng), d = g(rng);
    const double n = std::sqrt(a * a + b * b + c * c + d * d);
    if (n > 1e-6) return {cplx(a / n, b / n), cplx(c / n, d / n)};
  }
}

inline Vec3 random_vec3(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng)};
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

/// Composite Simpson rule with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle

#define EXPECT_ERRC(stmt, errc)                                   \
  do {                                                            \
    try {                                                         \
      stmt;                                                       \
      ADD_FAILURE() << "expected geoqm::Error " #errc;            \
    } catch (const geoqm::Error& e) {                             \
      EXPECT_EQ(e.code(), errc) << e.what();                      \
    }                                                             \
  } while (0)
