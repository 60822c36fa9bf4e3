#pragma once

// Two-level state algebra: spinors on S^3 = SU(2), the quaternion matrix
// realization of C^2, the su(2) basis e_k = (i/2) sigma_k, and the Killing
// inner product normalized so that R^3 embeds isometrically.

#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace geoqm {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2cd;

/// Absolute tolerance used for equality and unit checks across the library.
inline constexpr double kTol = 1e-12;

/// Point of C^2. Unit spinors are points of S^3; the raw constructor keeps
/// whatever it is given so that intermediate arithmetic can leave the sphere.
struct Spinor {
  cplx c1{1.0, 0.0};
  cplx c2{0.0, 0.0};

  Spinor() = default;
  Spinor(cplx a, cplx b) : c1(a), c2(b) {}

  /// Normalizing constructor. Throws invalid_argument on the zero vector.
  static Spinor unit(cplx a, cplx b);

  double norm_sq() const { return std::norm(c1) + std::norm(c2); }
  double norm() const;
  bool is_unit(double tol = kTol) const;
  Spinor normalized() const { return unit(c1, c2); }

  Spinor operator*(cplx s) const { return {c1 * s, c2 * s}; }
  Spinor operator+(const Spinor& o) const { return {c1 + o.c1, c2 + o.c2}; }
  Spinor operator-(const Spinor& o) const { return {c1 - o.c1, c2 - o.c2}; }

  /// (Re c1, Im c1, Re c2, Im c2).
  Eigen::Vector4d as_real4() const { return {c1.real(), c1.imag(), c2.real(), c2.imag()}; }
  static Spinor from_real4(const Eigen::Vector4d& v) { return {{v[0], v[1]}, {v[2], v[3]}}; }
};

static_assert(sizeof(Spinor) == 4 * sizeof(double), "batch kernels read Spinor as 4 doubles");

/// Hermitian product (xi, eta) = sum_k xi_k conj(eta_k).
cplx inner(const Spinor& xi, const Spinor& eta);

/// Point of S^2 = CP^1 (or an arbitrary real 3-vector in intermediate use).
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  static BlochVector from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
  double norm() const { return vec().norm(); }
};

static_assert(sizeof(BlochVector) == 3 * sizeof(double), "batch kernels write BlochVector as 3 doubles");

/// Quaternion form [[z1, z2], [-conj z2, conj z1]] of a spinor.
class MatRep {
 public:
  explicit MatRep(const Spinor& s);

  const Mat2& matrix() const { return m_; }
  cplx determinant() const { return m_.determinant(); }

  /// Bottom row equals (-conj z2, conj z1) to the given tolerance.
  bool has_quaternion_form(double tol = kTol) const;

 private:
  Mat2 m_;
};

MatRep omega(const Spinor& s);
Spinor omega_inverse(const MatRep& m);

/// su(2) element stored by its real coordinates in the basis e_k = (i/2) sigma_k.
class AlgebraElement {
 public:
  AlgebraElement() = default;
  AlgebraElement(double a1, double a2, double a3) : a_(a1, a2, a3) {}
  explicit AlgebraElement(const Vec3& a) : a_(a) {}

  static AlgebraElement basis(int k);  // k in {1, 2, 3}

  /// Recovers coordinates from an anti-Hermitian traceless matrix. Throws
  /// invalid_argument when the matrix is not in su(2) to within `tol`.
  static AlgebraElement from_matrix(const Mat2& m, double tol = kTol);

  const Vec3& coords() const { return a_; }
  double operator[](int i) const { return a_[i]; }

  Mat2 matrix() const;

  AlgebraElement operator+(const AlgebraElement& o) const { return AlgebraElement(a_ + o.a_); }
  AlgebraElement operator-(const AlgebraElement& o) const { return AlgebraElement(a_ - o.a_); }
  AlgebraElement operator-() const { return AlgebraElement(-a_); }
  friend AlgebraElement operator*(double s, const AlgebraElement& x) { return AlgebraElement(s * x.a_); }

  bool approx(const AlgebraElement& o, double tol = kTol) const {
    return (a_ - o.a_).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Vec3 a_ = Vec3::Zero();
};

/// Pauli matrices sigma_1..sigma_3 (k is 1-based).
Mat2 pauli(int k);

/// (X, Y)_K = (1/2) Tr(X Y^dagger).
double killing_inner(const AlgebraElement& x, const AlgebraElement& y);
double killing_norm(const AlgebraElement& x);

/// [X, Y] with structure constants epsilon_klm: [e1, e2] = e3. With the
/// standard Pauli matrices the realization e_k = (i/2) sigma_k reverses this
/// bracket, matrix([X, Y]) = -(X.matrix() Y.matrix() - Y.matrix() X.matrix()),
/// which is the bracket of right-invariant fields. Curvature and norms are
/// quadratic in the bracket and do not see the sign.
AlgebraElement commutator(const AlgebraElement& x, const AlgebraElement& y);

/// (sigma.A)(sigma.B) = A.B + i sigma.(A x B): returns (A.B, A x B).
std::pair<double, Vec3> pauli_product(const Vec3& a, const Vec3& b);

/// sigma . v as a 2x2 Hermitian matrix.
Mat2 sigma_dot(const Vec3& v);

/// x -> sum_k 2 x^k e_k; Killing norm of the image equals |x|.
AlgebraElement embed_r3(const Vec3& x);

}  // namespace geoqm
