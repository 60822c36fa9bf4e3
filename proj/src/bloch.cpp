#include "geoqm/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv.hpp"
#include "geoqm/error.hpp"
#include "geoqm/kernels.hpp"

namespace geoqm {

namespace {
constexpr double kChartSingularity = 1e-14;
}

BlochVector hopf_project(const Spinor& phi) {
  BlochVector b;
  kernels::table(kernels::Isa::scalar).hopf_project(reinterpret_cast<const double*>(&phi),
                                                    reinterpret_cast<double*>(&b), 1);
  return b;
}

std::vector<BlochVector> hopf_project_batch(std::span<const Spinor> phis) {
  std::vector<BlochVector> out(phis.size());
  kernels::hopf_project(phis, out);
  return out;
}

Vec3 sigma_expectation(const Spinor& phi) {
  const BlochVector b = hopf_project(phi);
  return {b.x, b.y, -b.z};
}

cplx inhomogeneous_coord(const Spinor& phi) {
  if (std::abs(phi.c1) <= kChartSingularity) {
    throw Error(Errc::chart_singularity, "the chart xi = phi2/phi1 excludes the line through (0, 1)");
  }
  return phi.c2 / phi.c1;
}

cplx stereographic(const BlochVector& b) { return cplx(b.x, b.y) / (1.0 - b.z); }

double sphere_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

double fs_distance(const Spinor& phi, const Spinor& psi) {
  return sphere_angle(hopf_project(phi).vec(), hopf_project(psi).vec());
}

double transition_probability(const Spinor& phi, const Spinor& psi) { return std::norm(inner(psi, phi)); }

std::vector<double> transition_probability_batch(std::span<const Spinor> phi, std::span<const Spinor> psi) {
  std::vector<double> out(phi.size());
  kernels::transition_probability(phi, psi, out);
  return out;
}

double projective_speed(const Spinor& phi0, const FieldParams& p) {
  const double b = p.B.norm();
  if (b == 0.0) return 0.0;
  const double c = std::clamp(sigma_expectation(phi0).dot(p.B / b), -1.0, 1.0);
  // |phi_+|^2 = (1 + c)/2, |phi_-|^2 = (1 - c)/2
  const double plus = 0.5 * (1.0 + c);
  const double minus = 0.5 * (1.0 - c);
  return 4.0 * p.omega() * std::sqrt(plus * minus);
}

PauliMoments pauli_moments(const Spinor& phi) {
  const BlochVector e = hopf_project(phi);
  return {e, Vec3(1.0 - e.x * e.x, 1.0 - e.y * e.y, 1.0 - e.z * e.z)};
}

double uncertainty_margin(const Spinor& phi) {
  const BlochVector b = hopf_project(phi);
  return (b.y * b.y + b.z * b.z) * (b.x * b.x + b.z * b.z) - b.z * b.z;
}

double energy_uncertainty(const Spinor& phi, const FieldParams& p) {
  const double b = p.B.norm();
  if (b == 0.0) return 0.0;
  return std::abs(p.mu) * b * std::sin(sphere_angle(p.B, sigma_expectation(phi)));
}

double variance_on_geodesic(double ck_sq, double lambda_k, double lambda_l) {
  if (!(ck_sq >= 0.0 && ck_sq <= 1.0)) throw Error(Errc::out_of_range, "|c_k|^2 must lie in [0, 1]");
  const double rest = 1.0 - ck_sq;
  const double mean = ck_sq * lambda_k + rest * lambda_l;
  return ck_sq * lambda_k * lambda_k + rest * lambda_l * lambda_l - mean * mean;
}

void write_bloch_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,z\n";
  const auto pts = hopf_project_batch(traj.states);
  for (std::size_t k = 0; k < pts.size(); ++k) csv::write_row(os, {traj.times[k], pts[k].x, pts[k].y, pts[k].z});
}

}  // namespace geoqm
