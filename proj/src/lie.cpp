#include "geoqm/lie.hpp"

#include <cmath>

#include "geoqm/error.hpp"

namespace geoqm {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::zero_field: return "zero field";
    case Errc::step_size: return "step size";
    case Errc::degenerate_plane: return "degenerate plane";
    case Errc::not_orthogonal: return "orthogonality violation";
    case Errc::chart_singularity: return "chart singularity";
    case Errc::out_of_range: return "out of range";
    case Errc::too_few_samples: return "too few samples";
    case Errc::non_termination: return "non-termination";
    case Errc::search_failure: return "search failure";
    case Errc::singular_hamiltonian: return "singular hamiltonian";
    case Errc::singular_system: return "singular system";
    case Errc::field_evaluation: return "field evaluation";
    case Errc::invalid_argument: return "invalid argument";
    case Errc::config: return "config";
    case Errc::io: return "io";
  }
  return "unknown";
}

Spinor Spinor::unit(cplx a, cplx b) {
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(Errc::invalid_argument, "cannot normalize a zero or non-finite spinor");
  }
  return {a / n, b / n};
}

double Spinor::norm() const { return std::sqrt(norm_sq()); }

bool Spinor::is_unit(double tol) const { return std::abs(norm_sq() - 1.0) <= tol; }

cplx inner(const Spinor& xi, const Spinor& eta) {
  return xi.c1 * std::conj(eta.c1) + xi.c2 * std::conj(eta.c2);
}

MatRep::MatRep(const Spinor& s) {
  m_ << s.c1, s.c2, -std::conj(s.c2), std::conj(s.c1);
}

bool MatRep::has_quaternion_form(double tol) const {
  return std::abs(m_(1, 0) + std::conj(m_(0, 1))) <= tol &&
         std::abs(m_(1, 1) - std::conj(m_(0, 0))) <= tol;
}

MatRep omega(const Spinor& s) { return MatRep(s); }

Spinor omega_inverse(const MatRep& m) { return {m.matrix()(0, 0), m.matrix()(0, 1)}; }

Mat2 pauli(int k) {
  Mat2 s;
  const cplx i(0.0, 1.0);
  switch (k) {
    case 1: s << 0.0, 1.0, 1.0, 0.0; break;
    case 2: s << 0.0, -i, i, 0.0; break;
    case 3: s << 1.0, 0.0, 0.0, -1.0; break;
    default: throw Error(Errc::invalid_argument, "pauli index must be 1, 2 or 3");
  }
  return s;
}

Mat2 sigma_dot(const Vec3& v) {
  Mat2 s;
  s << v.z(), cplx(v.x(), -v.y()), cplx(v.x(), v.y()), -v.z();
  return s;
}

AlgebraElement AlgebraElement::basis(int k) {
  if (k < 1 || k > 3) throw Error(Errc::invalid_argument, "basis index must be 1, 2 or 3");
  Vec3 a = Vec3::Zero();
  a[k - 1] = 1.0;
  return AlgebraElement(a);
}

Mat2 AlgebraElement::matrix() const {
  // sum_k a_k (i/2) sigma_k = (i/2) sigma.a
  return cplx(0.0, 0.5) * sigma_dot(a_);
}

AlgebraElement AlgebraElement::from_matrix(const Mat2& m, double tol) {
  const Mat2 herm_part = m + m.adjoint();
  if (herm_part.cwiseAbs().maxCoeff() > tol || std::abs(m.trace()) > tol) {
    throw Error(Errc::invalid_argument, "matrix is not anti-Hermitian and traceless");
  }
  // m = (i/2)[[a3, a1 - i a2], [a1 + i a2, -a3]]
  const double a3 = 2.0 * m(0, 0).imag();
  const double a1 = (m(0, 1) + m(1, 0)).imag();
  const double a2 = (m(0, 1) - m(1, 0)).real();
  return {a1, a2, a3};
}

double killing_inner(const AlgebraElement& x, const AlgebraElement& y) {
  // (e_k, e_l)_K = delta_kl / 4
  return 0.25 * x.coords().dot(y.coords());
}

double killing_norm(const AlgebraElement& x) { return std::sqrt(killing_inner(x, x)); }

AlgebraElement commutator(const AlgebraElement& x, const AlgebraElement& y) {
  return AlgebraElement(x.coords().cross(y.coords()));
}

std::pair<double, Vec3> pauli_product(const Vec3& a, const Vec3& b) { return {a.dot(b), a.cross(b)}; }

AlgebraElement embed_r3(const Vec3& x) { return AlgebraElement(2.0 * x); }

}  // namespace geoqm
