#include "transitepi/types.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "transitepi/error.h"

namespace transitepi {

std::optional<location_kind> parse_location_kind(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (lower == "home") return location_kind::home;
  if (lower == "work") return location_kind::work;
  if (lower == "school") return location_kind::school;
  if (lower == "other") return location_kind::other;
  if (lower == "transit") return location_kind::transit;
  return std::nullopt;
}

double distance_m(geo_point const& a, geo_point const& b) {
  constexpr auto kEarthRadiusM = 6371008.8;
  constexpr auto kRad = std::numbers::pi / 180.0;
  auto const dlat = (b.lat - a.lat) * kRad;
  auto const dlon = (b.lon - a.lon) * kRad;
  auto const s = std::sin(dlat / 2.0);
  auto const t = std::sin(dlon / 2.0);
  auto const h = s * s + std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * t * t;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

std::string_view to_string(data_errc c) {
  switch (c) {
    case data_errc::missing_file: return "missing_file";
    case data_errc::missing_column: return "missing_column";
    case data_errc::malformed_row: return "malformed_row";
    case data_errc::overlapping_activities: return "overlapping_activities";
    case data_errc::missing_home: return "missing_home";
    case data_errc::dangling_reference: return "dangling_reference";
    case data_errc::non_monotonic_times: return "non_monotonic_times";
    case data_errc::too_few_stops: return "too_few_stops";
    case data_errc::invalid_scale: return "invalid_scale";
    case data_errc::unknown_person: return "unknown_person";
  }
  return "unknown";
}

std::string_view to_string(model_errc c) {
  switch (c) {
    case model_errc::empty_population: return "empty_population";
    case model_errc::zero_non_bus_degree: return "zero_non_bus_degree";
    case model_errc::zero_mean_degree: return "zero_mean_degree";
    case model_errc::degenerate_degrees: return "degenerate_degrees";
    case model_errc::invalid_horizon: return "invalid_horizon";
    case model_errc::unreachable_r0: return "unreachable_r0";
  }
  return "unknown";
}

namespace {

std::string describe(data_errc code, std::string const& file, std::size_t line,
                     std::string const& subject, std::string const& reason) {
  auto msg = std::string{to_string(code)} + " (" + subject + ")";
  if (!file.empty()) {
    msg += " at " + file;
    if (line != 0) {
      msg += ":" + std::to_string(line);
    }
  }
  if (!reason.empty()) {
    msg += ": " + reason;
  }
  return msg;
}

}  // namespace

data_error::data_error(data_errc code, std::string file, std::size_t line,
                       std::string subject, std::string reason)
    : std::runtime_error{describe(code, file, line, subject, reason)},
      code_{code},
      file_{std::move(file)},
      line_{line},
      subject_{std::move(subject)},
      reason_{std::move(reason)} {}

}  // namespace transitepi
