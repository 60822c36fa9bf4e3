#include "geoqm/pair.hpp"

#include <cmath>
#include <vector>

#include "geoqm/error.hpp"
#include "parallel.hpp"

namespace geoqm {

const char* to_string(SpinValue s) { return s == SpinValue::plus ? "+" : "-"; }

PairState tensor_state(const Spinor& phi, const Spinor& psi) {
  PairState s;
  s.c_pp = phi.c1 * psi.c1;
  s.c_pm = phi.c1 * psi.c2;
  s.c_mp = phi.c2 * psi.c1;
  s.c_mm = phi.c2 * psi.c2;
  return s;
}

bool is_entangled(const PairState& s, double tol) { return std::abs(s.determinant()) > tol; }

SingletSectorState::SingletSectorState(cplx a, cplx b) {
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  if (!(n > 0.0)) throw Error(Errc::invalid_argument, "sector amplitudes cannot both vanish");
  a_ = a / n;
  b_ = b / n;
}

SingletSectorState SingletSectorState::identical(cplx a, cplx b, double tol) {
  if (std::abs(a + b) > tol) throw Error(Errc::invalid_argument, "identical particles require a = -b");
  return {a, b};
}

SingletSectorState SingletSectorState::singlet() { return {M_SQRT1_2, -M_SQRT1_2}; }

SingletSectorState SingletSectorState::with_weight(double a_sq) {
  if (!(a_sq >= 0.0 && a_sq <= 1.0)) throw Error(Errc::out_of_range, "|a|^2 must lie in [0, 1]");
  return {std::sqrt(a_sq), std::sqrt(1.0 - a_sq)};
}

PairState SingletSectorState::pair() const {
  PairState s;
  s.c_pm = a_;
  s.c_mp = b_;
  return s;
}

PairMeasurement measure_first_z(const SingletSectorState& s, const CaptureRegion& region, Stream& rng,
                                const TrialOptions& opts) {
  const CollapseOutcome o = run_collapse_trial(s.effective(), region, rng, opts);
  PairMeasurement m;
  m.steps = o.steps;
  if (o.eigenstate == 0) {
    m.first = SpinValue::plus;
    m.second = SpinValue::minus;
    m.collapsed = SingletSectorState(1.0, 0.0);
  } else {
    m.first = SpinValue::minus;
    m.second = SpinValue::plus;
    m.collapsed = SingletSectorState(0.0, 1.0);
  }
  return m;
}

EprStatistics run_epr_experiment(const SingletSectorState& s, const CaptureRegion& region, const BatchOptions& opts) {
  if (opts.n_trials == 0) throw Error(Errc::invalid_argument, "n_trials must be positive");
  region.validate();
  std::vector<PairMeasurement> results(opts.n_trials);
  TrialOptions trial = opts.trial;
  trial.record_trace = false;
  detail::parallel_chunks(opts.n_trials, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Stream rng(opts.seed, opts.tag, i);
      results[i] = measure_first_z(s, region, rng, trial);
    }
  });
  EprStatistics st;
  st.n_trials = opts.n_trials;
  st.seed = opts.seed;
  st.expected_plus = std::norm(s.a());
  for (const auto& m : results) {
    if (sign(m.first) == sign(m.second)) ++st.anti_correlation_violations;
    if (m.first == SpinValue::plus) {
      ++st.counts_plus_minus;
    } else {
      ++st.counts_minus_plus;
    }
  }
  st.z_score = binomial_z(st.counts_plus_minus, st.n_trials, st.expected_plus);
  return st;
}

}  // namespace geoqm
