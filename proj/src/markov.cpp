#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "geoqm/collapse.hpp"
#include "geoqm/error.hpp"
#include "parallel.hpp"

namespace geoqm {

double MarkovChainModel::target(std::size_t i) const {
  const double c = std::cos(0.5 * theta.at(i));
  return c * c;
}

MarkovChainModel build_markov_chain(std::size_t m) {
  if (m < 2) throw Error(Errc::invalid_argument, "the chain needs m >= 2");
  MarkovChainModel chain;
  chain.m = m;
  chain.delta = std::numbers::pi / double(m);
  chain.theta.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) chain.theta[i] = double(i) * chain.delta;
  chain.toward_zero_prob.resize(m - 1);
  // (h_i - h_{i+1}) / (h_{i-1} - h_{i+1}) with differences of cos^2 written
  // as products of sines to avoid cancellation near the poles.
  const double half = 0.5 * chain.delta;
  for (std::size_t i = 1; i < m; ++i) {
    const double t = chain.theta[i];
    chain.toward_zero_prob[i - 1] = std::sin(t + half) / (2.0 * std::sin(t) * std::cos(half));
  }
  return chain;
}

double harmonic_residual(const MarkovChainModel& chain) {
  double worst = 0.0;
  for (std::size_t i = 1; i < chain.m; ++i) {
    const double p = chain.p(i);
    const double r = p * chain.target(i - 1) + (1.0 - p) * chain.target(i + 1) - chain.target(i);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

std::vector<double> absorption_probabilities(const MarkovChainModel& chain) {
  const std::size_t m = chain.m;
  if (m < 2 || chain.toward_zero_prob.size() != m - 1) throw Error(Errc::invalid_argument, "malformed chain");
  // u_i - p_i u_{i-1} - (1 - p_i) u_{i+1} = 0, u_0 = 1, u_m = 0.
  const std::size_t n = m - 1;
  std::vector<double> cprime(n), dprime(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = chain.toward_zero_prob[k];
    const double sub = k == 0 ? 0.0 : -p;
    const double sup = -(1.0 - p);
    const double rhs = k == 0 ? p : 0.0;
    const double denom = 1.0 - (k == 0 ? 0.0 : sub * cprime[k - 1]);
    if (!(std::abs(denom) > 1e-300)) throw Error(Errc::singular_system, "zero pivot in the tridiagonal solve");
    cprime[k] = sup / denom;
    dprime[k] = (rhs - (k == 0 ? 0.0 : sub * dprime[k - 1])) / denom;
  }
  std::vector<double> u(m + 1);
  u[0] = 1.0;
  u[m] = 0.0;
  for (std::size_t k = n; k-- > 0;) u[k + 1] = dprime[k] - cprime[k] * u[k + 2];
  return u;
}

WalkResult walk_chain(const MarkovChainModel& chain, std::size_t start, Stream& rng, std::uint64_t max_steps) {
  if (start > chain.m) throw Error(Errc::out_of_range, "start state outside the chain");
  std::size_t i = start;
  WalkResult r;
  while (i != 0 && i != chain.m) {
    if (r.steps == max_steps) {
      throw Error(Errc::non_termination, "walk not absorbed within " + std::to_string(max_steps) + " steps");
    }
    i = rng.uniform() < chain.p(i) ? i - 1 : i + 1;
    ++r.steps;
  }
  r.absorbed_at_zero = i == 0;
  return r;
}

WalkStatistics estimate_absorption(const MarkovChainModel& chain, std::size_t start, std::size_t n_walks,
                                   std::uint64_t seed, unsigned workers, std::uint64_t tag) {
  if (n_walks == 0) throw Error(Errc::invalid_argument, "n_walks must be positive");
  std::vector<WalkResult> results(n_walks);
  detail::parallel_chunks(n_walks, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Stream rng(seed, tag, (std::uint64_t(start) << 32) + k);
      results[k] = walk_chain(chain, start, rng);
    }
  });
  WalkStatistics st;
  st.n_walks = n_walks;
  double steps = 0.0;
  for (const auto& r : results) {
    st.absorbed_at_zero += r.absorbed_at_zero;
    steps += double(r.steps);
  }
  st.mean_steps = steps / double(n_walks);
  return st;
}

}  // namespace geoqm
