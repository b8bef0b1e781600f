#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace transitepi {

enum class data_errc {
  missing_file,
  missing_column,
  malformed_row,
  overlapping_activities,
  missing_home,
  dangling_reference,
  non_monotonic_times,
  too_few_stops,
  invalid_scale,
  unknown_person
};

std::string_view to_string(data_errc);

/// Input data rejected. Carries the offending file and 1-based line (0 when
/// the problem concerns the file as a whole).
class data_error : public std::runtime_error {
public:
  data_error(data_errc code, std::string file, std::size_t line,
             std::string subject, std::string reason = {});

  data_errc code() const noexcept { return code_; }
  std::string const& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

  /// Column name, identifier or reference the error is about.
  std::string const& subject() const noexcept { return subject_; }
  std::string const& reason() const noexcept { return reason_; }

private:
  data_errc code_;
  std::string file_;
  std::size_t line_;
  std::string subject_;
  std::string reason_;
};

/// Invalid configuration or argument values.
class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Numerical preconditions of the analytic and simulation routines.
enum class model_errc {
  empty_population,
  zero_non_bus_degree,
  zero_mean_degree,
  degenerate_degrees,
  invalid_horizon,
  unreachable_r0
};

std::string_view to_string(model_errc);

class model_error : public std::runtime_error {
public:
  model_error(model_errc code, std::string const& what)
      : std::runtime_error{what}, code_{code} {}

  model_errc code() const noexcept { return code_; }

private:
  model_errc code_;
};

}  // namespace transitepi
