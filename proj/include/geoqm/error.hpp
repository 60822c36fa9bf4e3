#pragma once

#include <stdexcept>
#include <string>

namespace geoqm {

enum class Errc {
  zero_field,
  step_size,
  degenerate_plane,
  not_orthogonal,
  chart_singularity,
  out_of_range,
  too_few_samples,
  non_termination,
  search_failure,
  singular_hamiltonian,
  singular_system,
  field_evaluation,
  invalid_argument,
  config,
  io,
};

const char* to_string(Errc code) noexcept;

/// Library error. Every failure path in geoqm throws this with a code the
/// caller can branch on.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace geoqm
