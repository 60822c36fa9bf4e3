#pragma once

// Rays of conformally flat metrics g = eta^2 delta. With dtau = ds / eta the
// geodesic equation becomes d^2q/dtau^2 = (1/2) grad eta^2, a unit-mass
// particle in the potential U = -eta^2 / 2, and E = |v|^2/2 - eta^2/2 is
// conserved along the ray.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geoqm/flow.hpp"
#include "geoqm/lie.hpp"

namespace geoqm {

using VecN = Eigen::VectorXd;

/// A * exp(-|q - center|^2 / width^2).
struct GaussianBump {
  VecN center;
  double amplitude = 0.0;
  double width = 1.0;

  double value(const VecN& q) const;
  VecN gradient(const VecN& q) const;
};

class RefractiveField {
 public:
  using ScalarFn = std::function<double(const VecN&)>;
  using GradientFn = std::function<VecN(const VecN&)>;

  /// `grad` may be empty, in which case the gradient of `eta_sq` is taken by
  /// central differences with step 1e-6.
  explicit RefractiveField(ScalarFn eta_sq, GradientFn grad = {});

  static RefractiveField uniform(double eta_sq = 1.0);
  /// eta^2 = eta0_sq + 2 g.q
  static RefractiveField linear(double eta0_sq, const VecN& g);

  /// Copy of this field with an added bump (analytic gradient).
  RefractiveField with_bump(const GaussianBump& bump) const;

  /// Throws field_evaluation when eta^2 is not finite and positive at q.
  double eta_sq(const VecN& q) const;
  VecN grad_eta_sq(const VecN& q) const;
  double eta(const VecN& q) const;

  bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
  const std::vector<GaussianBump>& bumps() const { return bumps_; }

  /// |D(h) - D(2h)| / 3 for the finite-difference part of the gradient
  /// (zero when the gradient is analytic); a Richardson error estimate.
  double gradient_error_estimate(const VecN& q) const;

  static constexpr double kFiniteDifferenceStep = 1e-6;

 private:
  VecN base_gradient(const VecN& q, double h) const;

  ScalarFn eta_sq_;
  GradientFn grad_;
  std::vector<GaussianBump> bumps_;
};

struct RayState {
  VecN q;
  VecN v;
  double tau = 0.0;
};

/// |v|^2 / 2 - eta^2(q) / 2.
double ray_energy(const RayState& s, const RefractiveField& field);

/// Velocity-Verlet steps of d^2q/dtau^2 = (1/2) grad eta^2; returns
/// n_steps + 1 states including the start. Throws invalid_argument for
/// dtau <= 0 and field_evaluation (with the position) on field failure.
std::vector<RayState> integrate_ray(const RayState& start, const RefractiveField& field, double dtau,
                                    std::size_t n_steps);

/// Start state with |v| = eta(q) so that E = 0 and tau is the optical parameter.
RayState unit_energy_start(const VecN& q, const VecN& direction, const RefractiveField& field);

/// Trapezoid sum of eta dtau along the path.
double optical_arc_length(std::span<const RayState> path, const RefractiveField& field);
/// Sum of Euclidean chord lengths between consecutive positions.
double chord_length(std::span<const RayState> path);

/// Smallest distance from `target` to the polyline through the path.
double closest_approach(std::span<const RayState> path, const VecN& target);

struct LensOptions {
  double dtau = 1e-3;
  double epsilon = 1e-3;
  std::vector<double> widths{0.1, 0.15, 0.2, 0.3, 0.05};
  double max_amplitude = 4.0;
  std::size_t amplitude_grid = 64;
  int bisection_steps = 80;
};

struct LensDesign {
  RefractiveField field;
  GaussianBump bump;
  double miss = 0.0;
  std::vector<RayState> path;
};

/// Adds one Gaussian bump to `base` so that the ray from `start` passes
/// within options.epsilon of `target`. The bump sits a quarter of the way to
/// the target, offset sideways by its width; its amplitude is scanned on a
/// grid and refined by bisection on the signed lateral miss, for each width
/// of the ladder in turn. Throws search_failure when nothing qualifies.
LensDesign design_lens(const RayState& start, const VecN& target, const RefractiveField& base,
                       const LensOptions& options = {});

struct TrapReport {
  double energy = 0.0;
  double boundary_max_eta_sq = 0.0;
  /// -2E > max eta^2 on the boundary sphere: the kinetic energy would be
  /// negative there, so the ray cannot leave the ball.
  bool trapped = false;
};

/// Bump centred at `center` added to `base`.
RefractiveField trap_field(const RefractiveField& base, const VecN& center, double amplitude, double width);

/// Evaluates the energy barrier on the sphere of `radius` around `center`.
TrapReport trap_condition(const RayState& s, const RefractiveField& field, const VecN& center, double radius);

/// max_k |q_k - center|.
double max_excursion(std::span<const RayState> path, const VecN& center);

/// CSV with header tau,q0,...,q{n-1},E.
void write_ray_csv(std::ostream& os, std::span<const RayState> path, const RefractiveField& field);

// ---------------------------------------------------------------------------

/// h0 I + h . sigma.
struct Hamiltonian {
  double h0 = 0.0;
  Vec3 h = Vec3::Zero();

  /// -mu sigma.B
  static Hamiltonian spin_in_field(const FieldParams& p);
  Mat2 matrix() const;
  /// Eigenvalues h0 - |h|, h0 + |h|.
  std::pair<double, double> eigenvalues() const;
};

/// hbar^2 Re(h^-2 xi, eta) / |phi|^2, with 4-vectors read as
/// (Re c1, Im c1, Re c2, Im c2). Throws singular_hamiltonian when an
/// eigenvalue of h vanishes.
double hamiltonian_metric(const Hamiltonian& h, const Spinor& phi, const Eigen::Vector4d& xi,
                          const Eigen::Vector4d& eta, double hbar = 1.0);

}  // namespace geoqm
