#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace transitepi {

using minutes_t = std::int32_t;
using person_idx_t = std::uint32_t;
using location_idx_t = std::uint32_t;
using stop_idx_t = std::uint32_t;
using run_idx_t = std::uint32_t;

constexpr minutes_t kMinutesPerDay = 1440;
constexpr auto kInvalidIdx = std::numeric_limits<std::uint32_t>::max();

enum class location_kind : std::uint8_t { home, work, school, other, transit };

constexpr std::array<location_kind, 4> kPlaceKinds = {
    location_kind::home, location_kind::work, location_kind::school,
    location_kind::other};

constexpr std::string_view to_string(location_kind k) {
  switch (k) {
    case location_kind::home: return "home";
    case location_kind::work: return "work";
    case location_kind::school: return "school";
    case location_kind::other: return "other";
    case location_kind::transit: return "transit";
  }
  return "other";
}

std::optional<location_kind> parse_location_kind(std::string_view s);

struct geo_point {
  double lat{0.0};
  double lon{0.0};

  friend bool operator==(geo_point const&, geo_point const&) = default;
};

/// Great-circle distance in meters (haversine, mean Earth radius).
double distance_m(geo_point const& a, geo_point const& b);

}  // namespace transitepi
