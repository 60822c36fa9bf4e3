#include "geoqm/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv.hpp"
#include "geoqm/error.hpp"

namespace geoqm {

namespace {

constexpr double kMaxStepPhase = 0.1;

Spinor apply(const kernels::Su2Coeffs& u, const Spinor& s) {
  return {u.a * s.c1 + u.b * s.c2, -std::conj(u.b) * s.c1 + std::conj(u.a) * s.c2};
}

}  // namespace

void FieldParams::validate() const {
  if (!(hbar > 0.0)) throw Error(Errc::invalid_argument, "hbar must be positive");
  if (mu == 0.0) throw Error(Errc::invalid_argument, "mu must be nonzero");
  if (B.norm() == 0.0) throw Error(Errc::zero_field, "evolution needs a nonzero field");
}

kernels::Su2Coeffs propagator(const FieldParams& p, double t) {
  p.validate();
  const double b = p.B.norm();
  const Vec3 n = p.B / b;
  const double theta = p.mu * b * t / p.hbar;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  // cos I + i sin sigma.n = [[c + i s nz, s ny + i s nx], [-s ny + i s nx, c - i s nz]]
  return {cplx(c, s * n.z()), cplx(s * n.y(), s * n.x())};
}

Spinor evolve_exact(const Spinor& phi0, const FieldParams& p, double t) {
  return apply(propagator(p, t), phi0);
}

std::vector<Spinor> evolve_exact_batch(std::span<const Spinor> phi0, const FieldParams& p, double t) {
  std::vector<Spinor> out(phi0.size());
  kernels::apply_su2(propagator(p, t), phi0, out);
  return out;
}

Trajectory sample_exact(const Spinor& phi0, const FieldParams& p, double dt, std::size_t n_steps) {
  if (!(dt > 0.0)) throw Error(Errc::step_size, "dt must be positive");
  Trajectory traj;
  traj.meta = p;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = double(k) * dt;
    traj.times.push_back(t);
    traj.states.push_back(evolve_exact(phi0, p, t));
  }
  return traj;
}

double evolution_speed(const FieldParams& p) { return p.mu * p.B.norm() / p.hbar; }

Trajectory integrate_numeric(const Spinor& phi0, const FieldParams& p, double dt, std::size_t n_steps) {
  p.validate();
  if (!(dt > 0.0)) throw Error(Errc::step_size, "dt must be positive");
  if (dt * p.omega() > kMaxStepPhase) {
    throw Error(Errc::step_size, "dt * omega exceeds 0.1; reduce the step");
  }

  // Generator A = (i/hbar) mu sigma.B.
  const Mat2 gen = cplx(0.0, p.mu / p.hbar) * sigma_dot(p.B);
  const auto f = [&gen](const Eigen::Vector2cd& v) -> Eigen::Vector2cd { return gen * v; };

  Trajectory traj;
  traj.meta = p;
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(phi0);

  Eigen::Vector2cd y(phi0.c1, phi0.c2);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const Eigen::Vector2cd k1 = f(y);
    const Eigen::Vector2cd k2 = f(y + 0.5 * dt * k1);
    const Eigen::Vector2cd k3 = f(y + 0.5 * dt * k2);
    const Eigen::Vector2cd k4 = f(y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double n = y.norm();
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(n - 1.0));
    y /= n;
    traj.times.push_back(double(k) * dt);
    traj.states.emplace_back(y[0], y[1]);
  }
  return traj;
}

std::vector<double> arc_speeds(const Trajectory& traj) {
  std::vector<double> out;
  if (traj.size() < 2) return out;
  out.reserve(traj.size() - 1);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const Eigen::Vector4d a = traj.states[k].as_real4();
    const Eigen::Vector4d b = traj.states[k + 1].as_real4();
    // Angle via atan2(|a - b| |a + b|, ...) is stable for small steps.
    const double chord = (a - b).norm();
    const double sum = (a + b).norm();
    const double angle = 2.0 * std::atan2(chord, sum);
    out.push_back(angle / (traj.times[k + 1] - traj.times[k]));
  }
  return out;
}

double geodesic_planarity(const Trajectory& traj) {
  if (traj.size() < 4) throw Error(Errc::too_few_samples, "planarity needs at least 4 samples");
  Eigen::MatrixXd m(traj.size(), 4);
  for (std::size_t k = 0; k < traj.size(); ++k) m.row(Eigen::Index(k)) = traj.states[k].as_real4().transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[2];
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,re_c1,im_c1,re_c2,im_c2\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Spinor& s = traj.states[k];
    csv::write_row(os, {traj.times[k], s.c1.real(), s.c1.imag(), s.c2.real(), s.c2.imag()});
  }
}

}  // namespace geoqm
