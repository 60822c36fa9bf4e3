#include "geoqm/riemann.hpp"

#include <cmath>

#include "geoqm/error.hpp"

namespace geoqm {

namespace {
constexpr double kDegenerateGram = 1e-12;
constexpr double kOrthogonalityTol = 1e-10;
}  // namespace

AlgebraElement connection_coeff(const AlgebraElement& x, const AlgebraElement& y) {
  return 0.5 * commutator(x, y);
}

AlgebraElement curvature(const AlgebraElement& x, const AlgebraElement& y, const AlgebraElement& z) {
  return 0.25 * commutator(commutator(x, y), z);
}

double riemann_component(int i, int k, int l, int m) {
  const auto ei = AlgebraElement::basis(i);
  const auto ek = AlgebraElement::basis(k);
  const auto el = AlgebraElement::basis(l);
  const auto em = AlgebraElement::basis(m);
  return killing_inner(curvature(el, em, ei), ek);
}

double sectional_curvature(const AlgebraElement& x, const AlgebraElement& y) {
  const double xx = killing_inner(x, x);
  const double yy = killing_inner(y, y);
  const double xy = killing_inner(x, y);
  const double gram = xx * yy - xy * xy;
  if (gram < kDegenerateGram) {
    throw Error(Errc::degenerate_plane, "sectional curvature needs linearly independent directions");
  }
  return killing_inner(curvature(x, y, x), y) / gram;
}

std::pair<double, double> commutator_curvature_identity(const AlgebraElement& x, const AlgebraElement& y) {
  const double xx = killing_inner(x, x);
  const double yy = killing_inner(y, y);
  if (std::abs(killing_inner(x, y)) > kOrthogonalityTol * std::sqrt(xx * yy)) {
    throw Error(Errc::not_orthogonal, "commutator-curvature identity requires orthogonal directions");
  }
  const auto c = commutator(x, y);
  return {killing_inner(c, c), 4.0 * sectional_curvature(x, y) * xx * yy};
}

}  // namespace geoqm
