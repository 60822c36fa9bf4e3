#pragma once

// Levi-Civita geometry of the Killing metric on SU(2) = S^3, computed from
// the structure constants of su(2). All fields are left-invariant and are
// represented by their value at the identity.

#include <utility>

#include "geoqm/lie.hpp"

namespace geoqm {

/// nabla_{L_X} L_Y = (1/2) L_[X,Y].
AlgebraElement connection_coeff(const AlgebraElement& x, const AlgebraElement& y);

/// R(L_X, L_Y) L_Z = (1/4) L_[[X,Y],Z].
AlgebraElement curvature(const AlgebraElement& x, const AlgebraElement& y, const AlgebraElement& z);

/// Covariant components R_{ik,lm} = (R(e_l, e_m) e_i, e_k)_K, indices 1..3.
double riemann_component(int i, int k, int l, int m);

/// Sectional curvature of the plane spanned by L_X, L_Y:
///   (R(X,Y)X, Y)_K / ((X,X)_K (Y,Y)_K - (X,Y)_K^2).
/// Throws degenerate_plane when the Gram determinant is below 1e-12.
double sectional_curvature(const AlgebraElement& x, const AlgebraElement& y);

/// For Killing-orthogonal X, Y returns (|[X,Y]|_K^2, 4 R(p) |X|_K^2 |Y|_K^2).
/// Throws not_orthogonal when |(X,Y)_K| > 1e-10 |X|_K |Y|_K.
std::pair<double, double> commutator_curvature_identity(const AlgebraElement& x, const AlgebraElement& y);

}  // namespace geoqm
