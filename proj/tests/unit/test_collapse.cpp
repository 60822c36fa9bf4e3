#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "geoqm/collapse.hpp"
#include "geoqm/error.hpp"
#include "oracles.hpp"

using namespace geoqm;

namespace {
const double s2 = 1.0 / std::sqrt(2.0);

Spinor with_weight(double c1sq) { return {std::sqrt(c1sq), std::sqrt(1.0 - c1sq)}; }

double sigma_binomial(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }
}  // namespace

TEST(SourceProcess, DensityAndCdf) {
  EXPECT_NEAR(SourceProcess::density(0.0), 1.0 / M_PI, 1e-16);
  EXPECT_NEAR(SourceProcess::density(M_PI), 0.0, 1e-16);
  EXPECT_NEAR(SourceProcess::cdf(-M_PI), 0.0, 1e-16);
  EXPECT_NEAR(SourceProcess::cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(SourceProcess::cdf(M_PI), 1.0, 1e-15);
  // F' = density, and the density integrates to one.
  for (double t : {-2.5, -1.0, 0.3, 2.0}) {
    const double h = 1e-5;
    EXPECT_NEAR((SourceProcess::cdf(t + h) - SourceProcess::cdf(t - h)) / (2 * h), SourceProcess::density(t), 1e-9);
  }
  EXPECT_NEAR(oracle::simpson(SourceProcess::density, -M_PI, M_PI), 1.0, 1e-12);
  EXPECT_ERRC(SourceProcess(2), Errc::invalid_argument);
}

TEST(SourceProcess, InverseCdfBatchMatchesSingle) {
  std::vector<double> u{0.0, 0.1, 0.5, 0.77, 0.999999};
  std::vector<double> t(u.size());
  SourceProcess::inverse_cdf(u, t);
  for (std::size_t k = 0; k < u.size(); ++k) {
    EXPECT_EQ(t[k], SourceProcess::inverse_cdf(u[k]));
    EXPECT_NEAR(SourceProcess::cdf(t[k]), u[k], 1e-12);
  }
}

TEST(SourceProcess, UniformMaps) {
  EXPECT_DOUBLE_EQ(SourceProcess::alpha_from_uniform(0.0), M_PI / 2);
  EXPECT_DOUBLE_EQ(SourceProcess::beta_from_uniform(0.0), M_PI);
  EXPECT_GT(SourceProcess::alpha_from_uniform(std::nextafter(1.0, 0.0)), -M_PI / 2);
  EXPECT_GT(SourceProcess::beta_from_uniform(std::nextafter(1.0, 0.0)), -M_PI);
}

TEST(Sampler, KolmogorovSmirnovAgainstCdf) {
  const std::size_t n = 100000;
  SourceProcess src(0);
  Stream rng(7);
  std::vector<double> th(n);
  for (auto& t : th) t = sample_source(src, rng).theta;
  std::sort(th.begin(), th.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = (th[i] + std::sin(th[i]) + M_PI) / (2.0 * M_PI);
    d = std::max({d, std::abs(F - double(i) / n), std::abs(double(i + 1) / n - F)});
  }
  // Asymptotic 0.001 critical value of the Kolmogorov distribution.
  EXPECT_LT(d, 1.94947 / std::sqrt(double(n)));
}

TEST(Sampler, AlphaBetaUniform) {
  const std::size_t n = 100000;
  SourceProcess src(1);
  Stream rng(8);
  const int bins = 16;
  std::vector<double> ca(bins), cb(bins);
  for (std::size_t i = 0; i < n; ++i) {
    const SourceSample s = sample_source(src, rng);
    ASSERT_GT(s.alpha, -M_PI / 2);
    ASSERT_LE(s.alpha, M_PI / 2);
    ASSERT_GT(s.beta, -M_PI);
    ASSERT_LE(s.beta, M_PI);
    ca[std::min(bins - 1, int((s.alpha + M_PI / 2) / M_PI * bins))] += 1;
    cb[std::min(bins - 1, int((s.beta + M_PI) / (2 * M_PI) * bins))] += 1;
  }
  const double e = double(n) / bins;
  double xa = 0, xb = 0;
  for (int b = 0; b < bins; ++b) {
    xa += (ca[b] - e) * (ca[b] - e) / e;
    xb += (cb[b] - e) * (cb[b] - e) / e;
  }
  const double crit = boost::math::quantile(boost::math::chi_squared(bins - 1), 0.999);
  EXPECT_LT(xa, crit);
  EXPECT_LT(xb, crit);
}

TEST(Sampler, SourcesAreIndependent) {
  const std::size_t n = 100000;
  SourceProcess s0(0), s1(1);
  Stream rng(9);
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sample_source(s0, rng).theta;
    const double y = sample_source(s1, rng).theta;
    sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double r = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  EXPECT_LT(std::abs(r), 3.0 / std::sqrt(double(n)));
}

TEST(CaptureRegion, Validation) {
  CaptureRegion r;
  EXPECT_NO_THROW(r.validate());
  r.d_theta = 0.0;
  EXPECT_ERRC(r.validate(), Errc::out_of_range);
  r = CaptureRegion{};
  r.d_alpha = 0.5;
  EXPECT_ERRC(r.validate(), Errc::out_of_range);
  r = CaptureRegion{};
  r.d_beta = -0.1;
  EXPECT_ERRC(r.validate(), Errc::out_of_range);
  r = CaptureRegion{M_PI / 8, M_PI / 8, M_PI / 8};
  EXPECT_NO_THROW(r.validate());
}

TEST(CaptureProbability, SmallBoxLaw) {
  const CaptureRegion r{0.01, 0.02, 0.03};
  // cos^2(0) dV / (2 pi^3) with dV = 8 * 0.01 * 0.02 * 0.03 = 4.8e-5.
  EXPECT_NEAR(capture_probability(0.0, r), 7.740368263967878e-07, 1e-20);
  EXPECT_NEAR(capture_probability(M_PI / 2, r), 0.5 * 7.740368263967878e-07, 1e-20);
  EXPECT_NEAR(capture_probability(M_PI, r), 0.0, 1e-20);
  EXPECT_ERRC(capture_probability(-0.1, r), Errc::out_of_range);
  EXPECT_ERRC(capture_probability(4.0, r), Errc::out_of_range);
  // Ratio claim: dP1/dP2 depends only on the positions, not on the box size.
  const CaptureRegion big{0.1, 0.2, 0.3};
  EXPECT_NEAR(capture_probability(1.0, r) / capture_probability(2.0, r),
              capture_probability(1.0, big) / capture_probability(2.0, big), 1e-12);
}

TEST(CaptureProbability, ExactBoxAgainstQuadrature) {
  for (double d : {0.01, 0.05, 0.3}) {
    const CaptureRegion r{d, 0.2, 0.3};
    for (double t0 : {0.0, 0.4, 1.5, 3.0, M_PI}) {
      // Integrate the density over the (possibly wrapped) theta box.
      const double p_theta = oracle::simpson(
          [](double t) {
            const double w = std::remainder(t, 2 * M_PI);
            return std::pow(std::cos(0.5 * w), 2) / M_PI;
          },
          t0 - d, t0 + d);
      const double expected = p_theta * (0.4 / M_PI) * (0.6 / (2 * M_PI));
      EXPECT_NEAR(capture_probability_exact(t0, r), expected, 1e-14) << d << " " << t0;
      const double small_box = capture_probability(std::min(t0, M_PI), r);
      // The two differ by cos(t0) (d - sin d) / pi in the theta factor, O(d^3).
      const double gap = std::abs(std::cos(t0)) * (d - std::sin(d)) / M_PI * (0.4 / M_PI) * (0.3 / M_PI);
      EXPECT_NEAR(capture_probability_exact(t0, r), small_box, gap * (1 + 1e-9) + 1e-18);
    }
  }
}

TEST(ChartCoords, ReconstructState) {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 500; ++k) {
    const Spinor s = oracle::random_spinor(rng);
    for (int anchor = 0; anchor < 2; ++anchor) {
      const ChartCoords c = chart_coords(s, anchor);
      EXPECT_GT(c.alpha, -M_PI / 2);
      EXPECT_LE(c.alpha, M_PI / 2);
      const cplx a = std::polar(std::cos(0.5 * c.theta), c.beta);
      const cplx b = std::polar(std::sin(0.5 * c.theta), c.beta + c.alpha);
      const Spinor rebuilt = anchor == 0 ? Spinor(a, b) : Spinor(b, a);
      EXPECT_LE((rebuilt - s).norm(), 1e-12);
      // |theta| is the Fubini-Study distance to the anchor.
      const Spinor pole = anchor == 0 ? Spinor(1.0, 0.0) : Spinor(0.0, 1.0);
      EXPECT_NEAR(std::abs(c.theta), 2.0 * std::acos(std::min(1.0, std::abs(inner(s, pole)))), 1e-7);
    }
  }
  EXPECT_ERRC(chart_coords(Spinor(1.0, 0.0), 3), Errc::invalid_argument);
}

TEST(CollapseTrial, DeterministicAndTraced) {
  const Spinor phi = with_weight(0.3);
  CaptureRegion r;
  Stream a(1, stream_tag::collapse, 5), b(1, stream_tag::collapse, 5);
  TrialOptions traced;
  traced.record_trace = true;
  const CollapseOutcome x = run_collapse_trial(phi, r, a);
  const CollapseOutcome y = run_collapse_trial(phi, r, b, traced);
  EXPECT_EQ(x.eigenstate, y.eigenstate);
  EXPECT_EQ(x.steps, y.steps);
  EXPECT_FALSE(x.trace);
  ASSERT_TRUE(y.trace);
  EXPECT_EQ(y.trace->size(), 2 * y.steps);
  // The deciding step: exactly one source sample lies in its box.
  const auto& last0 = (*y.trace)[2 * y.steps - 2];
  const auto& last1 = (*y.trace)[2 * y.steps - 1];
  auto inside = [&](const SourceSample& s, int anchor) {
    const ChartCoords c = chart_coords(phi, anchor);
    return std::abs(std::remainder(s.theta - c.theta, 2 * M_PI)) <= r.d_theta &&
           std::abs(std::remainder(s.alpha - c.alpha, M_PI)) <= r.d_alpha &&
           std::abs(std::remainder(s.beta - c.beta, 2 * M_PI)) <= r.d_beta;
  };
  EXPECT_NE(inside(last0, 0), inside(last1, 1));
  EXPECT_EQ(inside(last0, 0) ? 0 : 1, y.eigenstate);
  for (std::uint64_t s = 0; s + 1 < y.steps; ++s) {
    EXPECT_EQ(inside((*y.trace)[2 * s], 0), inside((*y.trace)[2 * s + 1], 1)) << "step " << s;
  }
}

TEST(CollapseTrial, NonTermination) {
  TrialOptions o;
  o.max_steps = 3;
  Stream rng(3);
  EXPECT_ERRC(run_collapse_trial(with_weight(0.5), CaptureRegion{}, rng, o), Errc::non_termination);
}

TEST(CollapseTrial, ClassicalStatesStay) {
  BatchOptions o;
  o.seed = 4;
  o.n_trials = 2000;
  const auto st0 = run_born_experiment({1.0, 0.0}, CaptureRegion{M_PI / 8, M_PI / 8, M_PI / 8}, o);
  EXPECT_EQ(st0.counts[0], 2000u);
  EXPECT_FALSE(st0.z_scores[0]);
  const auto st1 = run_born_experiment({0.0, cplx(0, 1)}, CaptureRegion{}, o);
  EXPECT_EQ(st1.counts[1], 2000u);
}

TEST(CollapseTrial, TiesAreDiscarded) {
  // Wide boxes on an equator state make simultaneous captures common; a
  // discarded step cannot end the trial, so every trace step before the last
  // has both or neither source inside.
  const Spinor phi(s2, s2);
  const CaptureRegion r{M_PI / 8, M_PI / 8, M_PI / 8};
  TrialOptions o;
  o.record_trace = true;
  std::uint64_t ties = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Stream rng(11, stream_tag::collapse, i);
    const CollapseOutcome c = run_collapse_trial(phi, r, rng, o);
    for (std::uint64_t s = 0; s + 1 < c.steps; ++s) {
      const auto& a = (*c.trace)[2 * s];
      const auto& b = (*c.trace)[2 * s + 1];
      const ChartCoords c0 = chart_coords(phi, 0), c1 = chart_coords(phi, 1);
      const bool h0 = std::abs(std::remainder(a.theta - c0.theta, 2 * M_PI)) <= r.d_theta &&
                      std::abs(std::remainder(a.alpha - c0.alpha, M_PI)) <= r.d_alpha &&
                      std::abs(std::remainder(a.beta - c0.beta, 2 * M_PI)) <= r.d_beta;
      const bool h1 = std::abs(std::remainder(b.theta - c1.theta, 2 * M_PI)) <= r.d_theta &&
                      std::abs(std::remainder(b.alpha - c1.alpha, M_PI)) <= r.d_alpha &&
                      std::abs(std::remainder(b.beta - c1.beta, 2 * M_PI)) <= r.d_beta;
      ASSERT_EQ(h0, h1);
      ties += h0 && h1;
    }
  }
  EXPECT_GT(ties, 0u);
}

TEST(BornExperiment, WorkerCountDoesNotChangeResults) {
  BatchOptions o;
  o.seed = 99;
  o.n_trials = 3000;
  o.keep_outcomes = true;
  const auto a = run_born_experiment(with_weight(0.3), CaptureRegion{}, o);
  o.workers = 3;
  const auto b = run_born_experiment(with_weight(0.3), CaptureRegion{}, o);
  EXPECT_EQ(a.counts, b.counts);
  ASSERT_EQ(a.outcomes.size(), b.outcomes.size());
  for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
    EXPECT_EQ(a.outcomes[i].eigenstate, b.outcomes[i].eigenstate);
    EXPECT_EQ(a.outcomes[i].steps, b.outcomes[i].steps);
  }
  EXPECT_EQ(a.mean_steps, b.mean_steps);
}

TEST(BornExperiment, FrequenciesFollowSquaredAmplitudes) {
  for (double c : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    BatchOptions o;
    o.seed = 2024;
    o.n_trials = 20000;
    const auto st = run_born_experiment(with_weight(c), CaptureRegion{}, o);
    EXPECT_EQ(st.counts[0] + st.counts[1], o.n_trials);
    EXPECT_DOUBLE_EQ(st.expected[0], c);
    ASSERT_TRUE(st.z_scores[0]);
    EXPECT_LT(std::abs(*st.z_scores[0]), 3.0) << c;
    EXPECT_NEAR(*st.z_scores[0], -*st.z_scores[1], 1e-9);
    EXPECT_NEAR(*st.z_scores[0], (st.frequency(0) - c) / sigma_binomial(c, o.n_trials), 1e-9);
  }
}

TEST(BornExperiment, WideBoxFollowsFiniteWidthLaw) {
  // With the widest box the finite-width bias is visible and must match the
  // exact box law rather than |c1|^2.
  const CaptureRegion r{M_PI / 8, M_PI / 8, M_PI / 8};
  const double c = 0.9;
  BatchOptions o;
  o.seed = 5;
  o.n_trials = 100000;
  const auto st = run_born_experiment(with_weight(c), r, o);
  const double theta0 = 2.0 * std::acos(std::sqrt(c));
  const double p = collapse_probability_exact(theta0, r);
  EXPECT_LT(std::abs(st.frequency(0) - p), 3.0 * sigma_binomial(p, o.n_trials));
  // Independent check of the law: 1/2 + (sin d / d)(c - 1/2) up to O(q).
  EXPECT_NEAR(p, 0.5 + std::sin(r.d_theta) / r.d_theta * (c - 0.5), 1e-3);
  EXPECT_GT(std::abs(p - c), 5.0 * sigma_binomial(c, o.n_trials));
}

TEST(BornExperiment, OutcomesAreMemoryless) {
  // Outcome should not depend on how many non-capturing steps came first.
  BatchOptions o;
  o.seed = 17;
  o.n_trials = 40000;
  o.keep_outcomes = true;
  const auto st = run_born_experiment(with_weight(0.7), CaptureRegion{}, o);
  std::vector<std::uint64_t> steps;
  for (const auto& r : st.outcomes) steps.push_back(r.steps);
  std::sort(steps.begin(), steps.end());
  const int bins = 8;
  std::vector<std::uint64_t> edges;
  for (int b = 1; b < bins; ++b) edges.push_back(steps[steps.size() * b / bins]);
  std::vector<std::array<double, 2>> table(bins, {0.0, 0.0});
  for (const auto& r : st.outcomes) {
    const int b = int(std::upper_bound(edges.begin(), edges.end(), r.steps) - edges.begin());
    table[b][r.eigenstate] += 1;
  }
  const double total0 = double(st.counts[0]), total = double(st.n_trials);
  double chi = 0.0;
  for (const auto& row : table) {
    const double n = row[0] + row[1];
    for (int k = 0; k < 2; ++k) {
      const double e = n * (k == 0 ? total0 : total - total0) / total;
      chi += (row[k] - e) * (row[k] - e) / e;
    }
  }
  EXPECT_LT(chi, boost::math::quantile(boost::math::chi_squared(bins - 1), 0.999));
}

TEST(BornExperiment, ZScoreHelper) {
  EXPECT_FALSE(binomial_z(5, 10, 0.0));
  EXPECT_FALSE(binomial_z(5, 0, 0.5));
  EXPECT_NEAR(*binomial_z(60, 100, 0.5), 2.0, 1e-12);
  BatchOptions o;
  EXPECT_ERRC(run_born_experiment(with_weight(0.5), CaptureRegion{}, o), Errc::invalid_argument);
}

TEST(BornExperiment, OutcomeCsv) {
  std::ostringstream os;
  write_outcomes_csv(os, {});
  EXPECT_EQ(os.str(), "trial,eigenstate,steps\n");
  const std::vector<OutcomeRecord> rec{{0, 12}, {1, 3}};
  std::ostringstream os2;
  write_outcomes_csv(os2, rec);
  EXPECT_EQ(os2.str(), "trial,eigenstate,steps\n0,0,12\n1,1,3\n");
}

TEST(Markov, StepProbabilities) {
  const auto m2 = build_markov_chain(2);
  EXPECT_NEAR(m2.p(1), 0.5, 1e-15);
  EXPECT_ERRC(build_markov_chain(1), Errc::invalid_argument);
  for (std::size_t m : {3u, 10u, 64u}) {
    const auto c = build_markov_chain(m);
    ASSERT_EQ(c.theta.size(), m + 1);
    for (std::size_t i = 1; i < m; ++i) {
      EXPECT_GT(c.p(i), 0.0);
      EXPECT_LT(c.p(i), 1.0);
      EXPECT_NEAR(c.p(m - i), 1.0 - c.p(i), 1e-14);
      // Defining ratio from the targets directly.
      const double h0 = std::pow(std::cos(c.theta[i - 1] / 2), 2), h1 = std::pow(std::cos(c.theta[i] / 2), 2),
                   h2 = std::pow(std::cos(c.theta[i + 1] / 2), 2);
      EXPECT_NEAR(c.p(i), (h1 - h2) / (h0 - h2), 1e-12);
    }
    EXPECT_LE(harmonic_residual(c), 1e-14);
  }
}

TEST(Markov, AbsorptionMatchesDenseSolveAndClosedForm) {
  for (std::size_t m : {2u, 5u, 64u, 200u}) {
    const auto c = build_markov_chain(m);
    const auto u = absorption_probabilities(c);
    ASSERT_EQ(u.size(), m + 1);
    EXPECT_EQ(u[0], 1.0);
    EXPECT_EQ(u[m], 0.0);
    std::vector<std::vector<double>> a(m - 1, std::vector<double>(m - 1, 0.0));
    std::vector<double> b(m - 1, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
      a[i - 1][i - 1] = 1.0;
      if (i > 1) a[i - 1][i - 2] = -c.p(i);
      else b[0] += c.p(1);
      if (i + 1 < m) a[i - 1][i] = -(1.0 - c.p(i));
    }
    const auto x = oracle::solve_dense(a, b);
    for (std::size_t i = 1; i < m; ++i) {
      EXPECT_NEAR(u[i], x[i - 1], 1e-12);
      EXPECT_NEAR(u[i], std::pow(std::cos(c.theta[i] / 2), 2), 1e-10);
    }
  }
}

TEST(Markov, MonteCarloMatchesOracle) {
  const auto c = build_markov_chain(24);
  const auto u = absorption_probabilities(c);
  for (std::size_t start : {3u, 8u, 12u, 16u, 21u}) {
    const auto st = estimate_absorption(c, start, 20000, 77);
    EXPECT_LT(std::abs(st.frequency() - u[start]), 3.0 * sigma_binomial(u[start], 20000)) << start;
  }
}

TEST(Markov, WalkDetails) {
  const auto c = build_markov_chain(6);
  Stream rng(1);
  EXPECT_TRUE(walk_chain(c, 0, rng).absorbed_at_zero);
  EXPECT_EQ(walk_chain(c, 0, rng).steps, 0u);
  EXPECT_FALSE(walk_chain(c, 6, rng).absorbed_at_zero);
  EXPECT_ERRC(walk_chain(c, 7, rng), Errc::out_of_range);
  EXPECT_ERRC(walk_chain(c, 3, rng, 1), Errc::non_termination);
  const auto a = estimate_absorption(c, 2, 500, 3, 1);
  const auto b = estimate_absorption(c, 2, 500, 3, 4);
  EXPECT_EQ(a.absorbed_at_zero, b.absorbed_at_zero);
  EXPECT_EQ(a.mean_steps, b.mean_steps);
}

TEST(DeltaStates, OverlapAndDistance) {
  const Vec3 a(0.3, -1.0, 2.0);
  EXPECT_EQ(delta_overlap(a, a), 1.0);
  EXPECT_EQ(delta_distance_sq(a, a), 0.0);
  const Vec3 b = a + Vec3(0.06, 0.0, 0.08);  // |a - b| = 0.1
  EXPECT_NEAR(delta_overlap(a, b), 0.9900498337491681, 1e-15);
  EXPECT_NEAR(delta_distance_sq(a, b), 0.019900332501663812, 1e-15);
  EXPECT_NEAR(delta_distance_sq(a, a + Vec3(40, 0, 0)), 2.0, 1e-15);
}
