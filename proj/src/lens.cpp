#include "geoqm/lens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "csv.hpp"
#include "geoqm/error.hpp"
#include "geoqm/rng.hpp"

namespace geoqm {

namespace {

std::string describe(const VecN& q) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < q.size(); ++i) os << (i ? ", " : "") << csv::format(q[i]);
  os << ')';
  return os.str();
}

}  // namespace

double GaussianBump::value(const VecN& q) const {
  return amplitude * std::exp(-(q - center).squaredNorm() / (width * width));
}

VecN GaussianBump::gradient(const VecN& q) const {
  const VecN d = q - center;
  const double w2 = width * width;
  return (-2.0 * amplitude * std::exp(-d.squaredNorm() / w2) / w2) * d;
}

RefractiveField::RefractiveField(ScalarFn eta_sq, GradientFn grad)
    : eta_sq_(std::move(eta_sq)), grad_(std::move(grad)) {
  if (!eta_sq_) throw Error(Errc::invalid_argument, "refractive field needs an eta^2 function");
}

RefractiveField RefractiveField::uniform(double eta_sq) {
  if (!(eta_sq > 0.0)) throw Error(Errc::invalid_argument, "eta^2 must be positive");
  return RefractiveField([eta_sq](const VecN&) { return eta_sq; },
                         [](const VecN& q) { return VecN(VecN::Zero(q.size())); });
}

RefractiveField RefractiveField::linear(double eta0_sq, const VecN& g) {
  return RefractiveField([eta0_sq, g](const VecN& q) { return eta0_sq + 2.0 * g.dot(q); },
                         [g](const VecN&) { return VecN(2.0 * g); });
}

RefractiveField RefractiveField::with_bump(const GaussianBump& bump) const {
  if (!(bump.width > 0.0)) throw Error(Errc::invalid_argument, "bump width must be positive");
  RefractiveField out = *this;
  out.bumps_.push_back(bump);
  return out;
}

double RefractiveField::eta_sq(const VecN& q) const {
  double v;
  try {
    v = eta_sq_(q);
  } catch (const std::exception& e) {
    throw Error(Errc::field_evaluation, "eta^2 failed at q = " + describe(q) + ": " + e.what());
  }
  for (const auto& b : bumps_) v += b.value(q);
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw Error(Errc::field_evaluation, "eta^2 = " + csv::format(v) + " is not positive at q = " + describe(q));
  }
  return v;
}

double RefractiveField::eta(const VecN& q) const { return std::sqrt(eta_sq(q)); }

VecN RefractiveField::base_gradient(const VecN& q, double h) const {
  VecN g(q.size());
  VecN p = q;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    p[i] = q[i] + h;
    const double up = eta_sq_(p);
    p[i] = q[i] - h;
    const double down = eta_sq_(p);
    p[i] = q[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

VecN RefractiveField::grad_eta_sq(const VecN& q) const {
  VecN g;
  try {
    g = grad_ ? grad_(q) : base_gradient(q, kFiniteDifferenceStep);
  } catch (const std::exception& e) {
    throw Error(Errc::field_evaluation, "grad eta^2 failed at q = " + describe(q) + ": " + e.what());
  }
  if (g.size() != q.size()) throw Error(Errc::field_evaluation, "gradient dimension mismatch at q = " + describe(q));
  for (const auto& b : bumps_) g += b.gradient(q);
  if (!g.allFinite()) throw Error(Errc::field_evaluation, "grad eta^2 is not finite at q = " + describe(q));
  return g;
}

double RefractiveField::gradient_error_estimate(const VecN& q) const {
  if (grad_) return 0.0;
  const VecN d1 = base_gradient(q, kFiniteDifferenceStep);
  const VecN d2 = base_gradient(q, 2.0 * kFiniteDifferenceStep);
  return (d1 - d2).lpNorm<Eigen::Infinity>() / 3.0;
}

double ray_energy(const RayState& s, const RefractiveField& field) {
  return 0.5 * s.v.squaredNorm() - 0.5 * field.eta_sq(s.q);
}

std::vector<RayState> integrate_ray(const RayState& start, const RefractiveField& field, double dtau,
                                    std::size_t n_steps) {
  if (!(dtau > 0.0)) throw Error(Errc::invalid_argument, "dtau must be positive");
  if (start.q.size() != start.v.size() || start.q.size() == 0) {
    throw Error(Errc::invalid_argument, "ray position and velocity must have the same nonzero dimension");
  }
  std::vector<RayState> path;
  path.reserve(n_steps + 1);
  path.push_back(start);
  VecN q = start.q;
  VecN v = start.v;
  // eta_sq is evaluated at every position so that the ray never leaves the
  // region where the metric is defined, even with an analytic gradient.
  field.eta_sq(q);
  VecN a = 0.5 * field.grad_eta_sq(q);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    v += (0.5 * dtau) * a;
    q += dtau * v;
    field.eta_sq(q);
    a = 0.5 * field.grad_eta_sq(q);
    v += (0.5 * dtau) * a;
    path.push_back({q, v, start.tau + double(k) * dtau});
  }
  return path;
}

RayState unit_energy_start(const VecN& q, const VecN& direction, const RefractiveField& field) {
  const double n = direction.norm();
  if (!(n > 0.0)) throw Error(Errc::invalid_argument, "direction must be nonzero");
  return {q, (field.eta(q) / n) * direction, 0.0};
}

double optical_arc_length(std::span<const RayState> path, const RefractiveField& field) {
  double s = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    s += 0.5 * (field.eta(path[k - 1].q) + field.eta(path[k].q)) * (path[k].tau - path[k - 1].tau);
  }
  return s;
}

double chord_length(std::span<const RayState> path) {
  double s = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) s += (path[k].q - path[k - 1].q).norm();
  return s;
}

double closest_approach(std::span<const RayState> path, const VecN& target) {
  if (path.empty()) throw Error(Errc::invalid_argument, "empty path");
  double best = (path[0].q - target).norm();
  for (std::size_t k = 1; k < path.size(); ++k) {
    const VecN seg = path[k].q - path[k - 1].q;
    const double len2 = seg.squaredNorm();
    double t = len2 > 0.0 ? (target - path[k - 1].q).dot(seg) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (path[k - 1].q + t * seg - target).norm());
  }
  return best;
}

namespace {

struct Shot {
  bool reached = false;
  VecN station;
  std::vector<RayState> path;
};

// Integrates until the ray crosses the plane through `target` normal to `d`,
// then a few steps past it. Returns the interpolated crossing point.
Shot shoot(const RayState& start, const RefractiveField& field, const VecN& d, double station, double dtau,
           std::size_t max_steps) {
  Shot s;
  s.path.push_back(start);
  VecN q = start.q;
  VecN v = start.v;
  VecN a = 0.5 * field.grad_eta_sq(q);
  double prev = 0.0;
  std::size_t extra = 0;
  for (std::size_t k = 1; k <= max_steps; ++k) {
    v += (0.5 * dtau) * a;
    q += dtau * v;
    a = 0.5 * field.grad_eta_sq(q);
    v += (0.5 * dtau) * a;
    s.path.push_back({q, v, start.tau + double(k) * dtau});
    const double along = (q - start.q).dot(d);
    if (!s.reached && along >= station) {
      const double f = (station - prev) / (along - prev);
      const VecN& q0 = s.path[s.path.size() - 2].q;
      s.station = q0 + f * (q - q0);
      s.reached = true;
    }
    if (s.reached && ++extra > 8) break;
    prev = along;
  }
  return s;
}

}  // namespace

LensDesign design_lens(const RayState& start, const VecN& target, const RefractiveField& base,
                       const LensOptions& options) {
  if (target.size() != start.q.size()) throw Error(Errc::invalid_argument, "target dimension mismatch");
  const double speed = start.v.norm();
  if (!(speed > 0.0)) throw Error(Errc::invalid_argument, "start velocity must be nonzero");
  if ((target - start.q).norm() == 0.0) throw Error(Errc::invalid_argument, "start and target coincide");
  if (options.widths.empty() || options.amplitude_grid == 0) {
    throw Error(Errc::invalid_argument, "lens search needs a width ladder and an amplitude grid");
  }
  const VecN d = start.v / speed;
  const double station = (target - start.q).dot(d);
  if (!(station > 0.0)) throw Error(Errc::search_failure, "target lies behind the starting point");
  const std::size_t max_steps = std::size_t(std::ceil(4.0 * station / (speed * options.dtau))) + 16;

  Shot plain = shoot(start, base, d, station, options.dtau, max_steps);
  GaussianBump none{start.q + 0.25 * station * d, 0.0, options.widths.front()};
  if (plain.reached) {
    const double miss = closest_approach(plain.path, target);
    if (miss < options.epsilon) return {base, none, miss, std::move(plain.path)};
  } else {
    throw Error(Errc::search_failure, "unperturbed ray never reaches the target station");
  }

  VecN lateral = target - plain.station;
  lateral -= lateral.dot(d) * d;
  const double lat = lateral.norm();
  if (!(lat > 0.0)) throw Error(Errc::search_failure, "target offset along the ray cannot be corrected by bending");
  const VecN n = lateral / lat;

  double best_miss = std::numeric_limits<double>::infinity();
  for (const double w : options.widths) {
    const VecN centre = start.q + 0.25 * station * d + w * n;
    auto miss_at = [&](double amp, Shot* keep) {
      const RefractiveField f = base.with_bump({centre, amp, w});
      Shot s = shoot(start, f, d, station, options.dtau, max_steps);
      const double m = s.reached ? (s.station - target).dot(n) : std::numeric_limits<double>::quiet_NaN();
      if (keep) *keep = std::move(s);
      return m;
    };
    auto try_amp = [&](double lo, double hi, double flo) -> std::optional<LensDesign> {
      for (int it = 0; it < options.bisection_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = miss_at(mid, nullptr);
        if (std::isnan(fm)) return std::nullopt;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double amp = 0.5 * (lo + hi);
      Shot s;
      miss_at(amp, &s);
      const double miss = closest_approach(s.path, target);
      best_miss = std::min(best_miss, miss);
      if (miss < options.epsilon) {
        const GaussianBump bump{centre, amp, w};
        return LensDesign{base.with_bump(bump), bump, miss, std::move(s.path)};
      }
      return std::nullopt;
    };

    for (const double sign : {1.0, -1.0}) {
      double prev_a = 0.0;
      double prev_f = -lat;
      for (std::size_t k = 1; k <= options.amplitude_grid; ++k) {
        const double amp = sign * options.max_amplitude * double(k) / double(options.amplitude_grid);
        double f;
        try {
          f = miss_at(amp, nullptr);
        } catch (const Error& e) {
          if (e.code() != Errc::field_evaluation) throw;
          break;  // eta^2 went nonpositive; larger amplitudes only get worse
        }
        if (std::isnan(f)) break;
        if (f >= 0.0 && prev_f < 0.0) {
          if (auto found = try_amp(prev_a, amp, prev_f)) return std::move(*found);
        }
        prev_a = amp;
        prev_f = f;
      }
    }
  }
  throw Error(Errc::search_failure,
              "no Gaussian bump in the configured grid brings the ray within " + csv::format(options.epsilon) +
                  " of the target (best miss " + csv::format(best_miss) + ")");
}

RefractiveField trap_field(const RefractiveField& base, const VecN& center, double amplitude, double width) {
  return base.with_bump({center, amplitude, width});
}

TrapReport trap_condition(const RayState& s, const RefractiveField& field, const VecN& center, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "trap radius must be positive");
  const Eigen::Index n = center.size();
  TrapReport r;
  r.energy = ray_energy(s, field);
  double worst = -std::numeric_limits<double>::infinity();
  auto probe = [&](const VecN& dir) { worst = std::max(worst, field.eta_sq(center + radius * dir.normalized())); };
  if (n == 1) {
    probe(VecN::Constant(1, 1.0));
    probe(VecN::Constant(1, -1.0));
  } else if (n == 2) {
    constexpr int kSamples = 720;
    for (int k = 0; k < kSamples; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kSamples;
      probe((VecN(2) << std::cos(a), std::sin(a)).finished());
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      probe(VecN::Unit(n, i));
      probe(-VecN::Unit(n, i));
    }
    Stream rng(stream_tag::sampler);
    std::normal_distribution<double> gauss;
    for (int k = 0; k < 4096; ++k) {
      VecN dir(n);
      for (Eigen::Index i = 0; i < n; ++i) dir[i] = gauss(rng.engine());
      if (dir.norm() > 0.0) probe(dir);
    }
  }
  r.boundary_max_eta_sq = worst;
  r.trapped = -2.0 * r.energy > worst;
  return r;
}

double max_excursion(std::span<const RayState> path, const VecN& center) {
  double m = 0.0;
  for (const auto& s : path) m = std::max(m, (s.q - center).norm());
  return m;
}

void write_ray_csv(std::ostream& os, std::span<const RayState> path, const RefractiveField& field) {
  const Eigen::Index n = path.empty() ? 0 : path.front().q.size();
  os << "tau";
  for (Eigen::Index i = 0; i < n; ++i) os << ",q" << i;
  os << ",E\n";
  std::vector<double> row;
  for (const auto& s : path) {
    row.clear();
    row.push_back(s.tau);
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(s.q[i]);
    row.push_back(ray_energy(s, field));
    csv::write_row(os, row);
  }
}

Hamiltonian Hamiltonian::spin_in_field(const FieldParams& p) { return {0.0, -p.mu * p.B}; }

Mat2 Hamiltonian::matrix() const { return Mat2::Identity() * cplx(h0) + sigma_dot(h); }

std::pair<double, double> Hamiltonian::eigenvalues() const {
  const double r = h.norm();
  return {h0 - r, h0 + r};
}

double hamiltonian_metric(const Hamiltonian& h, const Spinor& phi, const Eigen::Vector4d& xi,
                          const Eigen::Vector4d& eta, double hbar) {
  const auto [lo, hi] = h.eigenvalues();
  const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
  if (std::min(std::abs(lo), std::abs(hi)) <= 1e-12 * scale) {
    throw Error(Errc::singular_hamiltonian, "the Hamiltonian has a zero eigenvalue");
  }
  const double n2 = phi.norm_sq();
  if (!(n2 > 0.0)) throw Error(Errc::invalid_argument, "phi must be nonzero");
  // h^-1 = (h0 - h.sigma) / (h0^2 - |h|^2)
  const Mat2 inv = (Mat2::Identity() * cplx(h.h0) - sigma_dot(h.h)) / cplx(lo * hi);
  const Eigen::Vector2cd x(cplx(xi[0], xi[1]), cplx(xi[2], xi[3]));
  const Eigen::Vector2cd y(cplx(eta[0], eta[1]), cplx(eta[2], eta[3]));
  const Eigen::Vector2cd hx = inv * (inv * x);
  const cplx ip = hx[0] * std::conj(y[0]) + hx[1] * std::conj(y[1]);
  return hbar * hbar * ip.real() / n2;
}

}  // namespace geoqm
