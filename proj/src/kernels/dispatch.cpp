#include <atomic>
#include <cstdlib>
#include <cstring>

#include "detail.hpp"
#include "geoqm/error.hpp"

namespace geoqm::kernels {

namespace {

Isa initial_isa() noexcept {
  const Isa best = detected_isa();
  if (const char* env = std::getenv("GEOQM_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0 && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return best;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(Errc::invalid_argument, std::string(what) + ": span sizes differ");
}

}  // namespace

const char* isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept {
  if (isa == Isa::scalar) return true;
#if defined(GEOQM_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detected_isa() noexcept { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) noexcept {
  const Isa chosen = isa_supported(isa) ? isa : Isa::scalar;
  active().store(chosen, std::memory_order_relaxed);
  return chosen;
}

const KernelTable& table(Isa isa) {
  static const KernelTable scalar_table{
      &detail::scalar::hopf_project,
      &detail::scalar::transition_probability,
      &detail::scalar::apply_su2,
      &detail::scalar::theta_inverse_cdf,
  };
#if defined(GEOQM_HAVE_AVX2)
  static const KernelTable avx2_table{
      &detail::avx2::hopf_project,
      &detail::avx2::transition_probability,
      &detail::avx2::apply_su2,
      &detail::avx2::theta_inverse_cdf,
  };
  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) return avx2_table;
#endif
  (void)isa;
  return scalar_table;
}

double kernel_sin(double x) noexcept { return detail::scalar::sin_0_2pi(x); }

std::span<const double> theta_cdf_table() noexcept {
  return {detail::theta_table(), kThetaTableIntervals + 1};
}

void hopf_project(std::span<const Spinor> in, std::span<BlochVector> out) {
  require_same_size(in.size(), out.size(), "hopf_project");
  table(active_isa()).hopf_project(reinterpret_cast<const double*>(in.data()),
                                   reinterpret_cast<double*>(out.data()), in.size());
}

void transition_probability(std::span<const Spinor> phi, std::span<const Spinor> psi, std::span<double> out) {
  require_same_size(phi.size(), psi.size(), "transition_probability");
  require_same_size(phi.size(), out.size(), "transition_probability");
  table(active_isa()).transition_probability(reinterpret_cast<const double*>(phi.data()),
                                             reinterpret_cast<const double*>(psi.data()), out.data(),
                                             phi.size());
}

void apply_su2(const Su2Coeffs& u, std::span<const Spinor> in, std::span<Spinor> out) {
  require_same_size(in.size(), out.size(), "apply_su2");
  table(active_isa()).apply_su2(u, reinterpret_cast<const double*>(in.data()),
                                reinterpret_cast<double*>(out.data()), in.size());
}

void theta_inverse_cdf(std::span<const double> u, std::span<double> theta) {
  require_same_size(u.size(), theta.size(), "theta_inverse_cdf");
  table(active_isa()).theta_inverse_cdf(u.data(), theta.data(), u.size());
}

}  // namespace geoqm::kernels
