#pragma once

// Spin evolution in a homogeneous magnetic field: i hbar dphi/dt = -mu sigma.B phi.
// Solutions are great circles on S^3 traversed at constant speed mu|B|/hbar.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "geoqm/kernels.hpp"
#include "geoqm/lie.hpp"

namespace geoqm {

struct FieldParams {
  Vec3 B = Vec3(0.0, 0.0, 1.0);
  double mu = 1.0;
  double hbar = 1.0;

  /// Larmor-type angular speed mu |B| / hbar.
  double omega() const { return mu * B.norm() / hbar; }

  /// Throws invalid_argument for mu == 0 or hbar <= 0, zero_field for B == 0.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Spinor> states;
  FieldParams meta;
  /// Largest | |phi| - 1 | seen before per-step renormalization.
  double max_norm_drift = 0.0;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
};

/// Coefficients of exp(i theta sigma.n) with theta = mu |B| t / hbar.
kernels::Su2Coeffs propagator(const FieldParams& p, double t);

/// phi_t = exp((i/hbar) mu sigma.B t) phi_0, closed form.
Spinor evolve_exact(const Spinor& phi0, const FieldParams& p, double t);

/// Same propagator applied to many initial states through the batch kernel.
std::vector<Spinor> evolve_exact_batch(std::span<const Spinor> phi0, const FieldParams& p, double t);

/// Samples of the exact solution at t_k = k dt, k = 0..n_steps.
Trajectory sample_exact(const Spinor& phi0, const FieldParams& p, double dt, std::size_t n_steps);

/// mu |B| / hbar (0 for B = 0).
double evolution_speed(const FieldParams& p);

/// Classical RK4 on dphi/dt = (i/hbar) mu (sigma.B) phi, renormalized every
/// step. Throws step_size when dt * omega > 0.1.
Trajectory integrate_numeric(const Spinor& phi0, const FieldParams& p, double dt, std::size_t n_steps);

/// Speed between consecutive samples, measured as the great-circle angle
/// between them divided by the time step (one value per interval).
std::vector<double> arc_speeds(const Trajectory& traj);

/// Third singular value of the N x 4 real sample matrix; 0 for a path that
/// lies in a 2-plane through the origin (a great circle).
double geodesic_planarity(const Trajectory& traj);

/// CSV with header t,re_c1,im_c1,re_c2,im_c2.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace geoqm
