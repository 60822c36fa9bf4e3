#include "geoqm/collapse.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "csv.hpp"
#include "geoqm/error.hpp"
#include "geoqm/kernels.hpp"
#include "parallel.hpp"

namespace geoqm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxHalfWidth = kPi / 8.0;
// A source whose anchor amplitude is below this (in |c|^2) sits antipodal to
// the state; the small-box law gives it zero capture probability.
constexpr double kInertAmplitudeSq = 1e-24;

double wrap_pi(double a) { return std::remainder(a, 2.0 * kPi); }

void check_anchor(int anchor) {
  if (anchor != 0 && anchor != 1) throw Error(Errc::invalid_argument, "anchor must be 0 or 1");
}

}  // namespace

ChartCoords chart_coords(const Spinor& phi, int anchor) {
  check_anchor(anchor);
  const Spinor u = phi.normalized();
  const cplx a = anchor == 0 ? u.c1 : u.c2;
  const cplx b = anchor == 0 ? u.c2 : u.c1;
  const double ra = std::abs(a);
  const double rb = std::abs(b);
  const double theta0 = 2.0 * std::atan2(rb, ra);
  const double phase_a = ra > 0.0 ? std::arg(a) : 0.0;
  const double az = rb > 0.0 ? wrap_pi(std::arg(b) - phase_a) : 0.0;
  ChartCoords c;
  c.beta = phase_a;
  if (az > -kPi / 2 && az <= kPi / 2) {
    c.alpha = az;
    c.theta = theta0;
  } else {
    c.alpha = az > 0.0 ? az - kPi : az + kPi;
    c.theta = -theta0;
  }
  return c;
}

SourceProcess::SourceProcess(int anchor) : anchor_(anchor) { check_anchor(anchor); }

double SourceProcess::density(double theta) {
  const double c = std::cos(0.5 * theta);
  return c * c / kPi;
}

double SourceProcess::cdf(double theta) { return (theta + std::sin(theta) + kPi) / (2.0 * kPi); }

double SourceProcess::inverse_cdf(double u) {
  double t = 0.0;
  kernels::table(kernels::Isa::scalar).theta_inverse_cdf(&u, &t, 1);
  return t;
}

void SourceProcess::inverse_cdf(std::span<const double> u, std::span<double> theta) {
  kernels::theta_inverse_cdf(u, theta);
}

double SourceProcess::alpha_from_uniform(double u) { return kPi / 2 - kPi * u; }
double SourceProcess::beta_from_uniform(double u) { return kPi - 2.0 * kPi * u; }

SourceSample sample_source(const SourceProcess&, Stream& rng) {
  const double ut = rng.uniform();
  const double ua = rng.uniform();
  const double ub = rng.uniform();
  return {SourceProcess::inverse_cdf(ut), SourceProcess::alpha_from_uniform(ua),
          SourceProcess::beta_from_uniform(ub)};
}

void CaptureRegion::validate() const {
  for (double w : {d_theta, d_alpha, d_beta}) {
    if (!(w > 0.0 && w <= kMaxHalfWidth + 1e-15)) {
      throw Error(Errc::out_of_range, "capture half-widths must lie in (0, pi/8], got " + std::to_string(w));
    }
  }
}

double capture_probability(double theta0, const CaptureRegion& region) {
  region.validate();
  if (!(theta0 >= 0.0 && theta0 <= kPi)) throw Error(Errc::out_of_range, "theta0 must lie in [0, pi]");
  const double c = std::cos(0.5 * theta0);
  return c * c * region.volume() / (2.0 * kPi * kPi * kPi);
}

double capture_probability_exact(double theta0, const CaptureRegion& region) {
  region.validate();
  // F(theta0 + d) - F(theta0 - d) is the same for wrapped and unwrapped boxes.
  const double p_theta = (region.d_theta + std::cos(theta0) * std::sin(region.d_theta)) / kPi;
  return p_theta * (2.0 * region.d_alpha / kPi) * (region.d_beta / kPi);
}

double collapse_probability_exact(double theta0, const CaptureRegion& region) {
  const double c = std::cos(0.5 * theta0);
  const double sn = std::sin(0.5 * theta0);
  if (sn * sn <= kInertAmplitudeSq) return 1.0;
  if (c * c <= kInertAmplitudeSq) return 0.0;
  const double p0 = capture_probability_exact(theta0, region);
  const double p1 = capture_probability_exact(kPi - theta0, region);
  const double w0 = p0 * (1.0 - p1);
  const double w1 = p1 * (1.0 - p0);
  return w0 / (w0 + w1);
}

namespace {

// Box test for an angle drawn as offset - scale * u, done on u directly:
// u hits when its circular distance (period 1) from the box centre is within
// half_width / period.
struct UniformBox {
  double centre;
  double half;

  UniformBox(double angle_offset, double target, double half_width, double period)
      : centre(std::fmod((angle_offset - target) / period + 2.0, 1.0)), half(half_width / period) {}

  bool hit(double u) const {
    double d = u - centre;
    if (d > 0.5) d -= 1.0;
    if (d < -0.5) d += 1.0;
    return std::abs(d) <= half;
  }
};

// theta is drawn as F^-1(u) with F increasing, so theta lands in the box
// exactly when u lies between F at the (wrapped) box edges.
struct ThetaBox {
  double lo;
  double hi;
  bool wraps;

  ThetaBox(double centre, double half_width) {
    lo = SourceProcess::cdf(wrap_pi(centre - half_width));
    hi = SourceProcess::cdf(wrap_pi(centre + half_width));
    wraps = lo > hi;
  }

  bool hit(double u) const { return wraps ? (u >= lo || u <= hi) : (u >= lo && u <= hi); }
};

}  // namespace

CollapseOutcome run_collapse_trial(const Spinor& phi, const CaptureRegion& region, Stream& rng,
                                   const TrialOptions& opts) {
  region.validate();
  const Spinor u = phi.normalized();
  const ChartCoords target[2] = {chart_coords(u, 0), chart_coords(u, 1)};
  const bool active[2] = {std::norm(u.c1) > kInertAmplitudeSq, std::norm(u.c2) > kInertAmplitudeSq};
  const UniformBox alpha_box[2] = {{kPi / 2, target[0].alpha, region.d_alpha, kPi},
                                   {kPi / 2, target[1].alpha, region.d_alpha, kPi}};
  const UniformBox beta_box[2] = {{kPi, target[0].beta, region.d_beta, 2.0 * kPi},
                                  {kPi, target[1].beta, region.d_beta, 2.0 * kPi}};
  const ThetaBox theta_box[2] = {{target[0].theta, region.d_theta}, {target[1].theta, region.d_theta}};
  const auto inverse = kernels::table(kernels::Isa::scalar).theta_inverse_cdf;

  CollapseOutcome out;
  if (opts.record_trace) out.trace.emplace();

  // Uniform k of step t for source s is element 6 (t - 1) + 3 s + k of one
  // counter stream (k = 0 theta, 1 alpha, 2 beta). Values that cannot change
  // the outcome are never computed, and theta is only inverted for traces.
  const CounterStream draws(rng.bits());
  for (std::uint64_t step = 1; step <= opts.max_steps; ++step) {
    bool hit[2];
    for (int s = 0; s < 2; ++s) {
      const std::uint64_t base = 6 * (step - 1) + 3 * std::uint64_t(s);
      hit[s] = active[s] && beta_box[s].hit(draws.uniform(base + 2)) && alpha_box[s].hit(draws.uniform(base + 1)) &&
               theta_box[s].hit(draws.uniform(base));
      if (out.trace) {
        const double ut = draws.uniform(base);
        double theta = 0.0;
        inverse(&ut, &theta, 1);
        out.trace->push_back({theta, SourceProcess::alpha_from_uniform(draws.uniform(base + 1)),
                              SourceProcess::beta_from_uniform(draws.uniform(base + 2))});
      }
    }
    if (hit[0] != hit[1]) {
      out.eigenstate = hit[0] ? 0 : 1;
      out.steps = step;
      return out;
    }
  }
  throw Error(Errc::non_termination,
              "no capture within " + std::to_string(opts.max_steps) + " steps");
}

std::optional<double> binomial_z(std::uint64_t count, std::size_t n, double p) {
  if (n == 0) return std::nullopt;
  const double var = p * (1.0 - p) / double(n);
  if (!(var > 0.0)) return std::nullopt;
  return (double(count) / double(n) - p) / std::sqrt(var);
}

std::vector<OutcomeRecord> run_trials(const Spinor& phi, const CaptureRegion& region, const BatchOptions& opts) {
  region.validate();
  std::vector<OutcomeRecord> records(opts.n_trials);
  TrialOptions trial = opts.trial;
  trial.record_trace = false;
  detail::parallel_chunks(opts.n_trials, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opts.seed, opts.tag, i);
      const CollapseOutcome o = run_collapse_trial(phi, region, rng, trial);
      records[i] = {o.eigenstate, o.steps};
    }
  });
  return records;
}

BornStatistics run_born_experiment(const Spinor& phi, const CaptureRegion& region, const BatchOptions& opts) {
  if (opts.n_trials == 0) throw Error(Errc::invalid_argument, "n_trials must be positive");
  const Spinor u = phi.normalized();
  BornStatistics st;
  st.n_trials = opts.n_trials;
  st.seed = opts.seed;
  st.expected = {std::norm(u.c1), std::norm(u.c2)};

  std::vector<OutcomeRecord> records = run_trials(u, region, opts);
  double steps = 0.0;
  for (const auto& r : records) {
    ++st.counts[r.eigenstate];
    steps += double(r.steps);
  }
  st.mean_steps = steps / double(records.size());
  for (int k = 0; k < 2; ++k) st.z_scores[k] = binomial_z(st.counts[k], st.n_trials, st.expected[k]);
  if (opts.keep_outcomes) st.outcomes = std::move(records);
  return st;
}

void write_outcomes_csv(std::ostream& os, std::span<const OutcomeRecord> outcomes) {
  os << "trial,eigenstate,steps\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    os << i << ',' << outcomes[i].eigenstate << ',' << outcomes[i].steps << '\n';
  }
}

double delta_overlap(const Vec3& a, const Vec3& b) { return std::exp(-(a - b).squaredNorm()); }

double delta_distance_sq(const Vec3& a, const Vec3& b) { return -2.0 * std::expm1(-(a - b).squaredNorm()); }

}  // namespace geoqm
