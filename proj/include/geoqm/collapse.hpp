#pragma once

// Stochastic collapse model. Each eigenstate of the measured observable
// anchors a fluctuating source whose position on S^3 is white noise in the
// chart (theta, alpha, beta) centred on that eigenstate: theta has density
// (1/pi) cos^2(theta/2) on (-pi, pi], alpha and beta are uniform. A source
// whose sampled position lands in the capture box around the state collapses
// the state to its eigenstate. The Markov-chain variant replaces the single
// push with a walk in steps of delta toward either pole.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "geoqm/lie.hpp"
#include "geoqm/rng.hpp"

namespace geoqm {

struct SourceSample {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Coordinates of a state in the chart anchored at eigenstate 0 = (1, 0) or
/// eigenstate 1 = (0, 1): theta in (-pi, pi] is the signed Fubini-Study
/// distance from the anchor along the great circle of azimuth alpha in
/// (-pi/2, pi/2], beta in (-pi, pi] is the phase of the anchor component.
struct ChartCoords {
  double theta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

ChartCoords chart_coords(const Spinor& phi, int anchor);

class SourceProcess {
 public:
  explicit SourceProcess(int anchor);

  int anchor() const { return anchor_; }

  /// (1/pi) cos^2(theta/2) on (-pi, pi].
  static double density(double theta);
  /// (theta + sin theta + pi) / (2 pi).
  static double cdf(double theta);
  /// Bisection inverse of cdf, bracketed by a 4096-interval table; |err| < 1e-12.
  static double inverse_cdf(double u);
  static void inverse_cdf(std::span<const double> u, std::span<double> theta);

  static double alpha_from_uniform(double u);  // (-pi/2, pi/2]
  static double beta_from_uniform(double u);   // (-pi, pi]

 private:
  int anchor_;
};

/// Draws (theta, alpha, beta) from three consecutive uniforms of `rng`.
SourceSample sample_source(const SourceProcess& s, Stream& rng);

/// Angular half-widths of the capture neighbourhood U, each in (0, pi/8].
struct CaptureRegion {
  double d_theta = 0.05;
  double d_alpha = 0.39269908169872414;  // pi/8
  double d_beta = 0.39269908169872414;   // pi/8

  /// Throws out_of_range when a half-width lies outside (0, pi/8].
  void validate() const;
  /// Full-width volume (2 d_theta)(2 d_alpha)(2 d_beta).
  double volume() const { return 8.0 * d_theta * d_alpha * d_beta; }
};

/// Small-box law dP = (1/(2 pi^3)) cos^2(theta0/2) dV. theta0 in [0, pi].
double capture_probability(double theta0, const CaptureRegion& region);

/// Exact probability that one source sample falls in the box centred at
/// chart angle theta0 (the small-box law up to O(d_theta^3)).
double capture_probability_exact(double theta0, const CaptureRegion& region);

/// Probability that the single-push trial ends at eigenstate 0 for a state
/// at distance theta0 from it, ties discarded. Tends to cos^2(theta0/2) as
/// the box shrinks.
double collapse_probability_exact(double theta0, const CaptureRegion& region);

struct CollapseOutcome {
  int eigenstate = 0;
  std::uint64_t steps = 0;
  /// Two samples per step (source 0 then source 1) when tracing is enabled.
  std::optional<std::vector<SourceSample>> trace;
};

struct TrialOptions {
  std::uint64_t max_steps = 100'000'000;
  bool record_trace = false;
};

/// Single-push collapse. Each step samples both sources; the first step in
/// which exactly one source lands in its capture box decides the outcome.
/// Steps in which both land are discarded. A source whose eigenstate
/// amplitude vanishes (|c|^2 <= 1e-24) never captures. Takes one word from `rng` as the
/// key of the per-trial CounterStream. Throws non_termination after
/// `max_steps` steps.
CollapseOutcome run_collapse_trial(const Spinor& phi, const CaptureRegion& region, Stream& rng,
                                   const TrialOptions& opts = {});

struct BatchOptions {
  std::uint64_t seed = 0;
  std::size_t n_trials = 0;
  unsigned workers = 1;
  std::uint64_t tag = stream_tag::collapse;
  TrialOptions trial;
  bool keep_outcomes = false;
};

struct OutcomeRecord {
  int eigenstate = 0;
  std::uint64_t steps = 0;
};

struct BornStatistics {
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  std::array<std::uint64_t, 2> counts{};
  std::array<double, 2> expected{};
  /// (freq - expected) / sqrt(expected (1 - expected) / n); empty when the
  /// expected probability is 0 or 1.
  std::array<std::optional<double>, 2> z_scores{};
  double mean_steps = 0.0;
  std::vector<OutcomeRecord> outcomes;

  double frequency(int k) const { return n_trials ? double(counts[k]) / double(n_trials) : 0.0; }
};

std::optional<double> binomial_z(std::uint64_t count, std::size_t n, double p);

/// Runs n_trials independent trials with streams Stream(seed, tag, trial)
/// and compares frequencies with |c1|^2, |c2|^2. Counts are identical for
/// any worker count.
BornStatistics run_born_experiment(const Spinor& phi, const CaptureRegion& region, const BatchOptions& opts);

/// Outcome of every trial, indexed by trial number.
std::vector<OutcomeRecord> run_trials(const Spinor& phi, const CaptureRegion& region, const BatchOptions& opts);

/// CSV rows trial,eigenstate,steps.
void write_outcomes_csv(std::ostream& os, std::span<const OutcomeRecord> outcomes);

// ---------------------------------------------------------------------------
// Markov-chain collapse walk on theta_i = i pi / m.

struct MarkovChainModel {
  std::size_t m = 0;
  double delta = 0.0;
  std::vector<double> theta;             // m + 1 states
  std::vector<double> toward_zero_prob;  // interior states 1..m-1, stored at i-1

  double p(std::size_t i) const { return toward_zero_prob.at(i - 1); }
  /// cos^2(theta_i / 2), the absorption target at theta = 0.
  double target(std::size_t i) const;
};

/// Interior step probabilities making cos^2(theta/2) harmonic for the
/// chain. Throws invalid_argument for m < 2.
MarkovChainModel build_markov_chain(std::size_t m);

/// max_i |p_i h_{i-1} + (1 - p_i) h_{i+1} - h_i| with h = cos^2(theta/2).
double harmonic_residual(const MarkovChainModel& chain);

/// Probability of absorption at theta = 0 from every state (tridiagonal
/// solve with u_0 = 1, u_m = 0).
std::vector<double> absorption_probabilities(const MarkovChainModel& chain);

struct WalkResult {
  bool absorbed_at_zero = false;
  std::uint64_t steps = 0;
};

WalkResult walk_chain(const MarkovChainModel& chain, std::size_t start, Stream& rng,
                      std::uint64_t max_steps = 100'000'000);

struct WalkStatistics {
  std::size_t n_walks = 0;
  std::uint64_t absorbed_at_zero = 0;
  double mean_steps = 0.0;
  double frequency() const { return n_walks ? double(absorbed_at_zero) / double(n_walks) : 0.0; }
};

/// Walks use Stream(seed, tag, start * 2^32 + walk index).
WalkStatistics estimate_absorption(const MarkovChainModel& chain, std::size_t start, std::size_t n_walks,
                                   std::uint64_t seed, unsigned workers = 1,
                                   std::uint64_t tag = stream_tag::markov);

// ---------------------------------------------------------------------------
// Gaussian-completed position states: (delta_a, delta_b) = exp(-|a - b|^2).

double delta_overlap(const Vec3& a, const Vec3& b);
/// |delta_a - delta_b|^2 = 2 (1 - exp(-|a - b|^2)).
double delta_distance_sq(const Vec3& a, const Vec3& b);

}  // namespace geoqm
