#pragma once

// Two spins on S^7 in C^2 (x) C^2 and the zero-total-spin sector spanned by
// phi_+ (x) psi_- and phi_- (x) psi_+. A z-measurement on the first spin is
// run as a single-push collapse on the sector viewed as a two-level system.

#include <cstdint>
#include <optional>
#include <string>

#include "geoqm/collapse.hpp"
#include "geoqm/lie.hpp"
#include "geoqm/rng.hpp"

namespace geoqm {

enum class SpinValue { plus = 1, minus = -1 };

inline int sign(SpinValue s) { return static_cast<int>(s); }
const char* to_string(SpinValue s);

/// Amplitudes of phi_i (x) psi_j. The position labels are carried along
/// for reporting only.
struct PairState {
  cplx c_pp{0.0};
  cplx c_pm{0.0};
  cplx c_mp{0.0};
  cplx c_mm{0.0};
  std::string first_label = "x";
  std::string second_label = "y";

  double norm_sq() const { return std::norm(c_pp) + std::norm(c_pm) + std::norm(c_mp) + std::norm(c_mm); }
  bool is_unit(double tol = kTol) const { return std::abs(norm_sq() - 1.0) <= tol; }
  /// c_pp c_mm - c_pm c_mp; vanishes exactly for product states.
  cplx determinant() const { return c_pp * c_mm - c_pm * c_mp; }
};

PairState tensor_state(const Spinor& phi, const Spinor& psi);

/// |c_pp c_mm - c_pm c_mp| > tol.
bool is_entangled(const PairState& s, double tol = kTol);

class SingletSectorState {
 public:
  /// a phi_+ (x) psi_- + b phi_- (x) psi_+, normalized. Throws
  /// invalid_argument for a = b = 0.
  SingletSectorState(cplx a, cplx b);

  /// Identical particles force a = -b. Throws invalid_argument otherwise.
  static SingletSectorState identical(cplx a, cplx b, double tol = kTol);
  static SingletSectorState singlet();
  /// Real amplitudes with |a|^2 = a_sq.
  static SingletSectorState with_weight(double a_sq);

  cplx a() const { return a_; }
  cplx b() const { return b_; }
  PairState pair() const;
  /// (a, b) on the Bloch sphere whose poles are the two classical points.
  Spinor effective() const { return {a_, b_}; }

 private:
  cplx a_;
  cplx b_;
};

struct PairMeasurement {
  SpinValue first = SpinValue::plus;
  SpinValue second = SpinValue::minus;
  SingletSectorState collapsed{1.0, 0.0};
  std::uint64_t steps = 0;
};

/// Collapse outcome 0 gives (+, -) and the point phi_+ (x) psi_-; outcome 1
/// gives (-, +) and phi_- (x) psi_+. Errors propagate from the collapse trial.
PairMeasurement measure_first_z(const SingletSectorState& s, const CaptureRegion& region, Stream& rng,
                                const TrialOptions& opts = {});

struct EprStatistics {
  std::size_t n_trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t counts_plus_minus = 0;
  std::uint64_t counts_minus_plus = 0;
  std::uint64_t anti_correlation_violations = 0;
  double expected_plus = 0.0;
  std::optional<double> z_score;

  double frequency_plus() const { return n_trials ? double(counts_plus_minus) / double(n_trials) : 0.0; }
};

/// Trials use Stream(seed, opts.tag, trial); pass stream_tag::epr to keep
/// them independent of Born-rule runs sharing the seed.
EprStatistics run_epr_experiment(const SingletSectorState& s, const CaptureRegion& region, const BatchOptions& opts);

}  // namespace geoqm
