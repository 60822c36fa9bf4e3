#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "geoqm/bloch.hpp"
#include "geoqm/cli.hpp"
#include "geoqm/collapse.hpp"
#include "geoqm/flow.hpp"
#include "geoqm/lens.hpp"
#include "geoqm/pair.hpp"
#include "geoqm/riemann.hpp"
#include "geoqm/rng.hpp"

namespace geoqm::cli {

namespace {

constexpr double kPi = std::numbers::pi;

// Typed access to the resolved settings. Every lookup is echoed into the
// report so that a run can be repeated from its own JSON.
class Params {
 public:
  explicit Params(Settings given) : given_(std::move(given)) {}

  double real(const std::string& key, double def) {
    const double v = has(key) ? parse_double(key, given_.at(key)) : def;
    echo_[key] = v;
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) {
    std::uint64_t v = def;
    if (has(key)) {
      const double d = parse_double(key, given_.at(key));
      if (!(d >= 0.0 && d <= 9.0e18 && std::floor(d) == d)) {
        throw Error(Errc::config, "'" + key + "' must be a nonnegative integer");
      }
      v = static_cast<std::uint64_t>(d);
    }
    echo_[key] = v;
    return v;
  }

  Vec3 vec3(const std::string& key, const Vec3& def) {
    Vec3 v = def;
    if (has(key)) {
      std::string s = given_.at(key);
      std::replace(s.begin(), s.end(), ',', ' ');
      std::istringstream is(s);
      std::string part[3], rest;
      if (!(is >> part[0] >> part[1] >> part[2]) || (is >> rest)) {
        throw Error(Errc::config, "'" + key + "' must be three comma-separated numbers");
      }
      for (int i = 0; i < 3; ++i) v[i] = parse_double(key, part[i]);
    }
    echo_[key] = {v.x(), v.y(), v.z()};
    return v;
  }

  bool flag(const std::string& key, bool def) {
    bool v = def;
    if (has(key)) {
      const std::string& s = given_.at(key);
      if (s == "1" || s == "true" || s == "yes") {
        v = true;
      } else if (s == "0" || s == "false" || s == "no") {
        v = false;
      } else {
        throw Error(Errc::config, "'" + key + "' must be a boolean");
      }
    }
    echo_[key] = v;
    return v;
  }

  /// Rejects settings that the experiment did not read.
  void finish(const std::string& experiment) const {
    for (const auto& [k, v] : given_) {
      if (!used_.count(k)) throw Error(Errc::config, "unknown setting '" + k + "' for experiment " + experiment);
    }
  }

  const json& echo() const { return echo_; }

 private:
  bool has(const std::string& key) {
    used_.insert(key);
    return given_.count(key) > 0;
  }

  static double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
      throw Error(Errc::config, "'" + key + "' is not a number: '" + s + "'");
    }
    return v;
  }

  Settings given_;
  std::set<std::string> used_;
  json echo_ = json::object();
};

struct Common {
  std::uint64_t seed;
  unsigned workers;
};

Common common(Params& p) {
  Common c;
  c.seed = p.count("seed", 1);
  c.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, p.count("workers", 1)));
  return c;
}

FieldParams field(Params& p, const Vec3& default_b) {
  FieldParams f;
  f.B = p.vec3("B", default_b);
  f.mu = p.real("mu", 1.0);
  f.hbar = p.real("hbar", 1.0);
  f.validate();
  return f;
}

Spinor state_from(double c1sq, double phase) {
  if (!(c1sq >= 0.0 && c1sq <= 1.0)) throw Error(Errc::config, "c1sq must lie in [0, 1]");
  return Spinor::unit(std::sqrt(c1sq), std::polar(std::sqrt(1.0 - c1sq), phase));
}

std::string to_csv(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

Spinor random_spinor(Stream& rng) {
  for (;;) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal(), d = rng.normal();
    if (a * a + b * b + c * c + d * d > 1e-12) return Spinor::unit({a, b}, {c, d});
  }
}

Vec3 random_vec3(Stream& rng) { return {rng.normal(), rng.normal(), rng.normal()}; }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

CaptureRegion region_from(Params& p) {
  CaptureRegion r;
  r.d_theta = p.real("region_width", r.d_theta);
  r.d_alpha = p.real("region_alpha", r.d_alpha);
  r.d_beta = p.real("region_beta", r.d_beta);
  try {
    r.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
  return r;
}

void born_block(Report& r, const BornStatistics& st) {
  r.extra["n_trials"] = st.n_trials;
  r.extra["per_eigenstate_counts"] = {st.counts[0], st.counts[1]};
  r.extra["expected"] = {st.expected[0], st.expected[1]};
  r.extra["z_scores"] = {optional_number(st.z_scores[0]), optional_number(st.z_scores[1])};
}

// Outcome frequencies agree with |c_k|^2 within 3 binomial sigma; when the
// expected value is 0 or 1 the count must match exactly.
void check_born(Report& r, const BornStatistics& st) {
  for (int k = 0; k < 2; ++k) {
    const std::string name = "z_" + std::to_string(k);
    if (st.z_scores[k]) {
      r.check_max("abs_" + name, std::abs(*st.z_scores[k]), 3.0);
    } else {
      r.check_abs("frequency_" + std::to_string(k), st.frequency(k), st.expected[k], 0.0);
    }
  }
  r.note("frequency_0", st.frequency(0));
  r.note("frequency_1", st.frequency(1));
  r.note("mean_steps", st.mean_steps);
}

// ---------------------------------------------------------------------------

Report evolve(Params& p) {
  Report r;
  const Common c = common(p);
  const FieldParams f = field(p, Vec3(0.48, -0.6, 0.64));
  const Spinor phi0 = state_from(p.real("c1sq", 0.5), p.real("phase", 0.0));
  const double t_final = p.real("t_final", 10.0);
  const double dt_req = p.real("dt", 1e-3);
  p.finish("evolve");
  if (!(t_final > 0.0 && dt_req > 0.0)) throw Error(Errc::config, "t_final and dt must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt_req - 1e-9));
  const double dt = t_final / double(n);

  const Trajectory num = integrate_numeric(phi0, f, dt, n);
  const Trajectory ex = sample_exact(phi0, f, dt, n);
  double speed_dev = 0.0;
  for (double s : arc_speeds(num)) speed_dev = std::max(speed_dev, std::abs(s - f.omega()));
  const Spinor d = num.states.back() - ex.states.back();

  r.seed = c.seed;
  r.note("omega", f.omega());
  r.note("max_norm_drift", num.max_norm_drift);
  r.check_max("speed_deviation", speed_dev, 1e-8);
  r.check_max("planarity_residual", geodesic_planarity(num), 1e-9);
  r.check_max("terminal_error", d.norm(), 1e-8);
  r.csv.push_back({"evolve_0.csv", to_csv([&](std::ostream& os) { write_trajectory_csv(os, num); })});
  r.csv.push_back({"evolve_1.csv", to_csv([&](std::ostream& os) { write_trajectory_csv(os, ex); })});
  return r;
}

Report bloch(Params& p) {
  Report r;
  const Common c = common(p);
  const FieldParams f = field(p, Vec3(0.0, 0.0, 1.0));
  const Spinor phi0 = state_from(p.real("c1sq", 0.5), p.real("phase", 0.0));
  const double t_final = p.real("t_final", 2.0 * kPi);
  const double dt_req = p.real("dt", 1e-3);
  p.finish("bloch");
  if (!(t_final > 0.0 && dt_req > 0.0)) throw Error(Errc::config, "t_final and dt must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(t_final / dt_req - 1e-9));
  const double dt = t_final / double(n);

  const Trajectory ex = sample_exact(phi0, f, dt, n);
  const auto pts = hopf_project_batch(ex.states);
  double unit_err = 0.0;
  double speed_err = 0.0;
  const double speed = projective_speed(phi0, f);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    unit_err = std::max(unit_err, std::abs(pts[k].norm() - 1.0));
    if (k) speed_err = std::max(speed_err, std::abs(sphere_angle(pts[k - 1].vec(), pts[k].vec()) / dt - speed));
  }
  r.seed = c.seed;
  r.note("projective_speed", speed);
  r.check_max("unit_error", unit_err, 1e-12);
  r.check_max("speed_error", speed_err, 1e-6 * std::max(1.0, f.omega()));
  r.csv.push_back({"bloch_0.csv", to_csv([&](std::ostream& os) { write_bloch_csv(os, ex); })});
  return r;
}

Report curvature(Params& p) {
  Report r;
  const Common c = common(p);
  const auto planes = p.count("trials", 100);
  const auto pairs = p.count("pairs", 1000);
  p.finish("curvature");

  std::ostringstream csv;
  csv << "plane,K\n";
  double worst = 0.0;
  std::size_t row = 0;
  auto add = [&](const AlgebraElement& x, const AlgebraElement& y) {
    const double k = sectional_curvature(x, y);
    worst = std::max(worst, std::abs(k - 1.0));
    csv << row++ << ',' << csv::format(k) << '\n';
  };
  for (int i = 1; i <= 3; ++i) add(AlgebraElement::basis(i), AlgebraElement::basis(i % 3 + 1));
  Stream rng(c.seed, stream_tag::states, 0);
  for (std::uint64_t k = 0; k < planes; ++k) {
    const AlgebraElement x(random_vec3(rng));
    const AlgebraElement y(random_vec3(rng));
    add(x, y);
  }
  double identity_err = 0.0;
  for (std::uint64_t k = 0; k < pairs; ++k) {
    const Vec3 x = random_vec3(rng);
    Vec3 y = random_vec3(rng);
    y -= (y.dot(x) / x.dot(x)) * x;
    const auto [lhs, rhs] = commutator_curvature_identity(AlgebraElement(x), AlgebraElement(y));
    identity_err = std::max(identity_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  r.seed = c.seed;
  r.check_max("sectional_curvature_error", worst, 1e-10);
  r.check_max("commutator_identity_error", identity_err, 1e-10);
  r.csv.push_back({"curvature_0.csv", csv.str()});
  return r;
}

Report uncertainty(Params& p) {
  Report r;
  const Common c = common(p);
  const auto states = p.count("trials", 10000);
  const auto energy_states = p.count("energy_states", 1000);
  const FieldParams f = field(p, Vec3(0.48, -0.6, 0.64));
  p.finish("uncertainty");

  Stream rng(c.seed, stream_tag::states, 1);
  std::ostringstream csv;
  csv << "x,y,z,margin\n";
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < states; ++k) {
    const Spinor s = random_spinor(rng);
    const BlochVector b = hopf_project(s);
    const double m = uncertainty_margin(s);
    min_margin = std::min(min_margin, m);
    csv::write_row(csv, {b.x, b.y, b.z, m});
  }
  const double eig = std::max(std::abs(uncertainty_margin({1.0, 0.0})), std::abs(uncertainty_margin({0.0, 1.0})));

  const Mat2 h = -f.mu * sigma_dot(f.B);
  double de_err = 0.0;
  for (std::uint64_t k = 0; k < energy_states; ++k) {
    const Spinor s = random_spinor(rng);
    const Eigen::Vector2cd v(s.c1, s.c2);
    const double mean = v.dot(h * v).real();
    const double second = v.dot(h * (h * v)).real();
    const double direct = std::sqrt(std::max(0.0, second - mean * mean));
    de_err = std::max(de_err, std::abs(energy_uncertainty(s, f) - direct));
  }
  r.seed = c.seed;
  r.check_min("min_margin", states ? min_margin : 0.0, -1e-12);
  r.check_max("eigenstate_margin", eig, 1e-15);
  r.check_max("energy_uncertainty_error", de_err, 1e-10);
  r.csv.push_back({"uncertainty_0.csv", csv.str()});
  return r;
}

Report born(Params& p) {
  Report r;
  const Common c = common(p);
  const Spinor phi = state_from(p.real("c1sq", 0.5), p.real("phase", 0.0));
  const CaptureRegion region = region_from(p);
  BatchOptions opts;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.n_trials = p.count("trials", 100000);
  opts.trial.max_steps = p.count("max_steps", 100000000);
  opts.keep_outcomes = p.flag("write_outcomes", false);
  p.finish("born");
  if (opts.n_trials == 0) throw Error(Errc::config, "trials must be positive");

  const BornStatistics st = run_born_experiment(phi, region, opts);
  r.seed = c.seed;
  born_block(r, st);
  check_born(r, st);
  r.note("finite_width_expected_0", collapse_probability_exact(std::abs(chart_coords(phi, 0).theta), region));
  if (opts.keep_outcomes) {
    r.csv.push_back({"born_0.csv", to_csv([&](std::ostream& os) { write_outcomes_csv(os, st.outcomes); })});
  }
  return r;
}

Report markov(Params& p) {
  Report r;
  const Common c = common(p);
  const auto m = p.count("delta_grid", 48);
  const double start_theta = p.real("start_theta", kPi / 3.0);
  const auto walks = p.count("trials", 100000);
  const auto csv_walks = p.count("csv_walks", 2000);
  const double tol = p.real("mc_tolerance", 0.005);
  p.finish("markov");
  if (m < 2) throw Error(Errc::config, "delta_grid must be at least 2");
  const double pos = start_theta * double(m) / kPi;
  const auto start = static_cast<std::size_t>(std::llround(pos));
  if (std::abs(pos - double(start)) > 1e-9 || start > m) {
    throw Error(Errc::config, "start_theta must be a grid point i pi / delta_grid");
  }
  if (walks == 0) throw Error(Errc::config, "trials must be positive");

  const MarkovChainModel chain = build_markov_chain(m);
  const std::vector<double> u = absorption_probabilities(chain);
  double exact_err = 0.0;
  for (std::size_t i = 0; i <= m; ++i) exact_err = std::max(exact_err, std::abs(u[i] - chain.target(i)));
  const WalkStatistics st = estimate_absorption(chain, start, walks, c.seed, c.workers);

  std::ostringstream csv;
  csv << "theta,exact_u,mc_frequency\n";
  for (std::size_t i = 0; i <= m; ++i) {
    double freq = i == 0 ? 1.0 : 0.0;
    if (i > 0 && i < m && csv_walks > 0) {
      freq = estimate_absorption(chain, i, csv_walks, c.seed, c.workers, stream_tag::markov + 1).frequency();
    }
    csv::write_row(csv, {chain.theta[i], u[i], freq});
  }

  r.seed = c.seed;
  r.check_max("harmonic_residual", harmonic_residual(chain), 1e-14);
  r.check_max("exact_error", exact_err, 1e-10);
  r.check_abs("mc_frequency", st.frequency(), u[start], tol);
  r.note("mean_steps", st.mean_steps);
  r.note("expected", u[start]);
  r.csv.push_back({"markov_0.csv", csv.str()});
  return r;
}

Report lens(Params& p) {
  Report r;
  const Common c = common(p);
  const double offset = p.real("target_offset", 0.1);
  const double dtau = p.real("dtau", 1e-3);
  const double eps = p.real("epsilon", 1e-3);
  const double amp = p.real("drift_amplitude", 0.3);
  const double width = p.real("drift_width", 0.5);
  const double drift_dtau = p.real("drift_dtau", 2e-4);
  const auto steps = p.count("steps", 10000);
  p.finish("lens");

  // Straight line in a uniform medium.
  const RefractiveField flat = RefractiveField::uniform(1.0);
  const RayState line_start{VecN::Zero(2), (VecN(2) << 1.0, 0.5).finished(), 0.0};
  const auto line = integrate_ray(line_start, flat, dtau, steps);
  double line_dev = 0.0;
  for (const auto& s : line) {
    line_dev = std::max(line_dev, (s.q - (line_start.q + s.tau * line_start.v)).norm());
  }

  // Energy drift past a Gaussian bump.
  const RefractiveField bumpy = flat.with_bump({VecN::Zero(2), amp, width});
  const RayState drift_start = unit_energy_start((VecN(2) << -1.0, 0.2).finished(), VecN::Unit(2, 0), bumpy);
  const auto drift_path = integrate_ray(drift_start, bumpy, drift_dtau, steps);
  const double e0 = ray_energy(drift_path.front(), bumpy);
  double drift = 0.0;
  for (const auto& s : drift_path) drift = std::max(drift, std::abs(ray_energy(s, bumpy) - e0));

  // Lens toward a displaced target.
  LensOptions lo;
  lo.dtau = dtau;
  lo.epsilon = eps;
  const RayState lens_start{VecN::Zero(2), VecN::Unit(2, 0), 0.0};
  const VecN target = (VecN(2) << 1.0, offset).finished();
  const LensDesign design = design_lens(lens_start, target, flat, lo);

  r.seed = c.seed;
  r.check_max("line_deviation", line_dev, 1e-10);
  r.check_max("energy_drift", drift, 1e-8);
  r.check_max("lens_miss", design.miss, eps);
  r.note("lens_amplitude", design.bump.amplitude);
  r.note("lens_width", design.bump.width);
  r.csv.push_back({"lens_0.csv", to_csv([&](std::ostream& os) { write_ray_csv(os, design.path, design.field); })});
  r.csv.push_back({"lens_1.csv", to_csv([&](std::ostream& os) { write_ray_csv(os, drift_path, bumpy); })});
  return r;
}

Report epr(Params& p) {
  Report r;
  const Common c = common(p);
  const double a_sq = p.real("a_sq", 0.5);
  const CaptureRegion region = region_from(p);
  BatchOptions opts;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.tag = stream_tag::epr;
  opts.n_trials = p.count("trials", 100000);
  opts.trial.max_steps = p.count("max_steps", 100000000);
  const double tol = p.real("frequency_tolerance", 0.005);
  p.finish("epr");
  if (!(a_sq >= 0.0 && a_sq <= 1.0)) throw Error(Errc::config, "a_sq must lie in [0, 1]");
  if (opts.n_trials == 0) throw Error(Errc::config, "trials must be positive");

  const SingletSectorState s(std::sqrt(a_sq), -std::sqrt(1.0 - a_sq));
  const EprStatistics st = run_epr_experiment(s, region, opts);
  r.seed = c.seed;
  r.extra["n_trials"] = st.n_trials;
  r.extra["counts_plus_minus"] = st.counts_plus_minus;
  r.extra["counts_minus_plus"] = st.counts_minus_plus;
  r.extra["anti_correlation_violations"] = st.anti_correlation_violations;
  r.check_max("anti_correlation_violations", double(st.anti_correlation_violations), 0.0);
  r.check_abs("frequency_plus", st.frequency_plus(), a_sq, tol);
  r.note("z_score", optional_number(st.z_score));
  r.note("entangled", is_entangled(s.pair()));
  return r;
}

Report e2_split(Params& p) {
  Report r;
  const Common c = common(p);
  const FieldParams f = field(p, Vec3(0.0, -1.0, 0.0));
  const double t_final = p.real("t_final", 0.25 * kPi / f.omega());
  const double dt = p.real("dt", 1e-3);
  const CaptureRegion region = region_from(p);
  BatchOptions opts;
  opts.seed = c.seed;
  opts.workers = c.workers;
  opts.n_trials = p.count("trials", 100000);
  opts.trial.max_steps = p.count("max_steps", 100000000);
  p.finish("e2-split");
  if (!(t_final >= 0.0 && dt > 0.0)) throw Error(Errc::config, "t_final must be nonnegative and dt positive");
  if (opts.n_trials == 0) throw Error(Errc::config, "trials must be positive");

  const Spinor up(1.0, 0.0);
  const Spinor end = evolve_exact(up, f, t_final);
  const Spinor expected(M_SQRT1_2, M_SQRT1_2);
  const std::size_t n = t_final > 0.0 ? static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9)) : 0;
  const Trajectory path = sample_exact(up, f, n ? t_final / double(n) : dt, n);

  const BornStatistics st = run_born_experiment(end, region, opts);
  r.seed = c.seed;
  r.check_max("state_error", (end - expected).norm(), 1e-10);
  born_block(r, st);
  check_born(r, st);
  r.csv.push_back({"e2-split_0.csv", to_csv([&](std::ostream& os) { write_trajectory_csv(os, path); })});
  return r;
}

using Runner = Report (*)(Params&);

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"evolve", evolve}, {"bloch", bloch}, {"curvature", curvature}, {"uncertainty", uncertainty},
      {"born", born},     {"markov", markov}, {"lens", lens},         {"epr", epr},
      {"e2-split", e2_split}};
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"evolve", "bloch", "curvature", "uncertainty", "born",
                                              "markov", "lens",  "epr",       "e2-split"};
  return names;
}

Report run_experiment(const std::string& name, const Settings& settings) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw Error(Errc::config, "unknown experiment '" + name + "'");
  Params params(settings);
  Report r = it->second(params);
  r.experiment = name;
  r.config = params.echo();
  return r;
}

int run(const std::string& experiment, const std::filesystem::path& config_path, const Settings& overrides,
        const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
  try {
    Settings settings = config_path.empty() ? Settings{} : load_config(config_path);
    settings = merge(settings, overrides);
    const Report r = run_experiment(experiment, settings);
    write_report(r, out_dir);
    out << summary_line(r) << '\n';
    return r.passed() ? 0 : 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace geoqm::cli
