#pragma once

// Projective geometry of the Hopf fibration S^3 -> CP^1 = S^2.
//
// Sign convention: the Bloch vector follows
//   x = phi1 conj(phi2) + conj(phi1) phi2
//   y = i (phi1 conj(phi2) - conj(phi1) phi2)
//   z = |phi2|^2 - |phi1|^2
// so (1, 0) sits at z = -1. The physical expectation vector <sigma> is the
// same point with z negated; quantities that couple to a field direction
// (energy spread, projective speed) use <sigma>.

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "geoqm/flow.hpp"
#include "geoqm/lie.hpp"

namespace geoqm {

BlochVector hopf_project(const Spinor& phi);
std::vector<BlochVector> hopf_project_batch(std::span<const Spinor> phis);

/// (<sigma_x>, <sigma_y>, <sigma_z>) for a unit spinor.
Vec3 sigma_expectation(const Spinor& phi);

/// xi = phi2 / phi1. Throws chart_singularity when |phi1| <= 1e-14.
cplx inhomogeneous_coord(const Spinor& phi);

/// Stereographic image (x + i y) / (1 - z) of a Bloch vector.
cplx stereographic(const BlochVector& b);

/// Angle between two unit 3-vectors via atan2(|a x b|, a.b).
double sphere_angle(const Vec3& a, const Vec3& b);

/// Fubini-Study distance in [0, pi]: the angle between the Bloch vectors.
double fs_distance(const Spinor& phi, const Spinor& psi);

/// |<psi, phi>|^2.
double transition_probability(const Spinor& phi, const Spinor& psi);
std::vector<double> transition_probability_batch(std::span<const Spinor> phi, std::span<const Spinor> psi);

/// ds/dt of the projected Schroedinger path: 4 omega |phi_+| |phi_-| where
/// phi_+- are the components along the eigenvectors of sigma.B; equals
/// 2 omega sin(theta) with theta the angle between B and <sigma>.
double projective_speed(const Spinor& phi0, const FieldParams& p);

struct PauliMoments {
  BlochVector expectations;  // Bloch components in the convention above
  Vec3 variances;            // (1 - x^2, 1 - y^2, 1 - z^2)
};

PauliMoments pauli_moments(const Spinor& phi);

/// (y^2 + z^2)(x^2 + z^2) - z^2; nonnegative on the unit sphere.
double uncertainty_margin(const Spinor& phi);

/// mu |B| sin(theta), theta the angle between B and <sigma>.
double energy_uncertainty(const Spinor& phi, const FieldParams& p);

/// Variance of a two-outcome observable along the geodesic through its
/// eigenstates. Throws out_of_range unless 0 <= ck_sq <= 1.
double variance_on_geodesic(double ck_sq, double lambda_k, double lambda_l);

/// CSV with header t,x,y,z.
void write_bloch_csv(std::ostream& os, const Trajectory& traj);

}  // namespace geoqm
