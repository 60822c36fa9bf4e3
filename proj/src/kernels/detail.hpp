#pragma once

#include <cstddef>
#include <numbers>

#include "geoqm/kernels.hpp"

namespace geoqm::kernels::detail {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kTableStep = kTwoPi / double(kThetaTableIntervals);

// Taylor coefficients of sin(y)/y in y^2, highest order first:
// (-1)^k / (2k+1)!, k = 11..0. Exact on |y| <= pi/2 to below one ulp.
inline constexpr double kSinCoeffs[12] = {
    -1.0 / 25852016738884976640000.0,  // 1/23!
    1.0 / 51090942171709440000.0,      // 1/21!
    -1.0 / 121645100408832000.0,       // 1/19!
    1.0 / 355687428096000.0,           // 1/17!
    -1.0 / 1307674368000.0,            // 1/15!
    1.0 / 6227020800.0,                // 1/13!
    -1.0 / 39916800.0,                 // 1/11!
    1.0 / 362880.0,                    // 1/9!
    -1.0 / 5040.0,                     // 1/7!
    1.0 / 120.0,                       // 1/5!
    -1.0 / 6.0,                        // 1/3!
    1.0,
};

namespace scalar {
void hopf_project(const double* spinors, double* xyz, std::size_t n);
void transition_probability(const double* phi, const double* psi, double* out, std::size_t n);
void apply_su2(Su2Coeffs u, const double* in, double* out, std::size_t n);
void theta_inverse_cdf(const double* u, double* theta, std::size_t n);
double sin_0_2pi(double x);
}  // namespace scalar

#if defined(GEOQM_HAVE_AVX2)
namespace avx2 {
void hopf_project(const double* spinors, double* xyz, std::size_t n);
void transition_probability(const double* phi, const double* psi, double* out, std::size_t n);
void apply_su2(Su2Coeffs u, const double* in, double* out, std::size_t n);
void theta_inverse_cdf(const double* u, double* theta, std::size_t n);
}  // namespace avx2
#endif

/// Table of G(x_j) = x_j - sin(x_j), built once with the scalar kernel sine.
const double* theta_table();

}  // namespace geoqm::kernels::detail
