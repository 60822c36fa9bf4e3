#pragma once

// Batch kernels for the data-parallel inner loops: Hopf projection,
// transition probabilities, closed-form SU(2) propagation and the inverse
// CDF of the source-angle density. Every kernel has a scalar reference and
// an AVX2 variant; the variant is chosen once at runtime from CPUID and can
// be pinned with GEOQM_SIMD=scalar|avx2.
//
// Both variants perform the same IEEE operations in the same order (no FMA
// contraction, shared polynomial sine), so their results are bit-identical.

#include <cstddef>
#include <span>

#include "geoqm/lie.hpp"

namespace geoqm::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa) noexcept;

/// Best ISA supported by this CPU and build.
Isa detected_isa() noexcept;

/// ISA used by the typed front-ends below.
Isa active_isa() noexcept;

/// Pins the ISA used by the front-ends; requesting an unsupported ISA falls
/// back to scalar. Returns the ISA actually selected.
Isa set_active_isa(Isa isa) noexcept;

bool isa_supported(Isa isa) noexcept;

/// Quaternion coefficients of U = [[a, b], [-conj b, conj a]].
struct Su2Coeffs {
  cplx a;
  cplx b;
};

/// Raw kernel entry points. Spinors are 4 doubles each (Re c1, Im c1, Re c2,
/// Im c2); Bloch vectors are 3 doubles each.
struct KernelTable {
  void (*hopf_project)(const double* spinors, double* xyz, std::size_t n);
  void (*transition_probability)(const double* phi, const double* psi, double* out, std::size_t n);
  void (*apply_su2)(Su2Coeffs u, const double* in, double* out, std::size_t n);
  void (*theta_inverse_cdf)(const double* u, double* theta, std::size_t n);
};

const KernelTable& table(Isa isa);

/// Polynomial sine on [0, 2 pi] shared by every variant (|err| < 2e-16).
double kernel_sin(double x) noexcept;

/// G(x) = x - sin x on the 4097-point grid x_j = 2 pi j / 4096.
std::span<const double> theta_cdf_table() noexcept;
inline constexpr std::size_t kThetaTableIntervals = 4096;
inline constexpr int kThetaBisectionSteps = 31;

// Typed front-ends dispatching through active_isa(). Output spans must have
// the same length as the inputs.
void hopf_project(std::span<const Spinor> in, std::span<BlochVector> out);
void transition_probability(std::span<const Spinor> phi, std::span<const Spinor> psi, std::span<double> out);
void apply_su2(const Su2Coeffs& u, std::span<const Spinor> in, std::span<Spinor> out);
void theta_inverse_cdf(std::span<const double> u, std::span<double> theta);

}  // namespace geoqm::kernels
