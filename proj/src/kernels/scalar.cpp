// Scalar reference kernels. The AVX2 variants in avx2.cpp mirror these
// operation for operation; keep the two in sync.

#include "detail.hpp"

namespace geoqm::kernels::detail {

namespace scalar {

double sin_0_2pi(double x) {
  // sin x = sin(pi - x), then fold [-pi, pi] onto [-pi/2, pi/2].
  double y = kPi - x;
  if (y > kHalfPi) {
    y = kPi - y;
  } else if (y < -kHalfPi) {
    y = -kPi - y;
  }
  const double y2 = y * y;
  double p = kSinCoeffs[0];
  for (int k = 1; k < 12; ++k) p = p * y2 + kSinCoeffs[k];
  return p * y;
}

void hopf_project(const double* s, double* xyz, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k, s += 4, xyz += 3) {
    const double r1 = s[0], i1 = s[1], r2 = s[2], i2 = s[3];
    xyz[0] = 2.0 * (r1 * r2 + i1 * i2);
    xyz[1] = 2.0 * (r1 * i2 - i1 * r2);
    xyz[2] = (r2 * r2 + i2 * i2) - (r1 * r1 + i1 * i1);
  }
}

void transition_probability(const double* p, const double* q, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k, p += 4, q += 4) {
    const double re = (q[0] * p[0] + q[1] * p[1]) + (q[2] * p[2] + q[3] * p[3]);
    const double im = (q[0] * p[1] - q[1] * p[0]) + (q[2] * p[3] - q[3] * p[2]);
    out[k] = re * re + im * im;
  }
}

void apply_su2(Su2Coeffs u, const double* in, double* out, std::size_t n) {
  const double ar = u.a.real(), ai = u.a.imag(), br = u.b.real(), bi = u.b.imag();
  for (std::size_t k = 0; k < n; ++k, in += 4, out += 4) {
    const double r1 = in[0], i1 = in[1], r2 = in[2], i2 = in[3];
    out[0] = (ar * r1 - ai * i1) + (br * r2 - bi * i2);
    out[1] = (ar * i1 + ai * r1) + (br * i2 + bi * r2);
    out[2] = (ar * r2 + ai * i2) - (br * r1 + bi * i1);
    out[3] = (ar * i2 - ai * r2) + (bi * r1 - br * i1);
  }
}

void theta_inverse_cdf(const double* u, double* theta, std::size_t n) {
  const double* g = theta_table();
  for (std::size_t k = 0; k < n; ++k) {
    const double target = u[k] * kTwoPi;
    std::size_t lo = 0;
    for (std::size_t step = kThetaTableIntervals / 2; step >= 1; step /= 2) {
      if (g[lo + step] <= target) lo += step;
    }
    double a = double(lo) * kTableStep;
    double b = a + kTableStep;
    for (int it = 0; it < kThetaBisectionSteps; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = m - sin_0_2pi(m);
      if (gm <= target) {
        a = m;
      } else {
        b = m;
      }
    }
    theta[k] = 0.5 * (a + b) - kPi;
  }
}

}  // namespace scalar

const double* theta_table() {
  static const auto table = [] {
    static double g[kThetaTableIntervals + 1];
    for (std::size_t j = 0; j <= kThetaTableIntervals; ++j) {
      const double x = double(j) * kTableStep;
      g[j] = x - scalar::sin_0_2pi(x);
    }
    return g;
  }();
  return table;
}

}  // namespace geoqm::kernels::detail
