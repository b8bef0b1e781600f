#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "transitepi/types.h"

namespace transitepi {

struct gtfs_stop {
  std::string id;
  geo_point position;

  friend bool operator==(gtfs_stop const&, gtfs_stop const&) = default;
};

/// Times are minutes since midnight of the service day; GTFS allows values
/// past 24:00, which are kept as is (see normalize_service_minute).
struct stop_time {
  stop_idx_t stop{kInvalidIdx};
  minutes_t arrival{0};
  minutes_t departure{0};

  friend bool operator==(stop_time const&, stop_time const&) = default;
};

struct vehicle_run {
  std::string trip_id;
  std::string route_id;
  std::vector<stop_time> stops;  // ordered by stop_sequence, size >= 2

  minutes_t first_departure() const { return stops.front().departure; }
  minutes_t last_arrival() const { return stops.back().arrival; }

  friend bool operator==(vehicle_run const&, vehicle_run const&) = default;
};

struct transit_feed {
  std::vector<gtfs_stop> stops;
  std::vector<std::string> routes;
  std::vector<vehicle_run> runs;

  bool empty() const { return stops.empty() || runs.empty(); }
  std::optional<stop_idx_t> find_stop(std::string_view id) const;
  std::optional<run_idx_t> find_run(std::string_view trip_id) const;

  friend bool operator==(transit_feed const&, transit_feed const&) = default;
};

/// Contents of the four GTFS text files.
struct gtfs_sources {
  std::string stops;
  std::string routes;
  std::string trips;
  std::string stop_times;
};

/// Reads stops.txt, routes.txt, trips.txt and stop_times.txt from a
/// directory. Throws data_error on missing files, dangling references
/// (stop_time to stop or trip, trip to route) and time sequences that run
/// backwards.
transit_feed parse_gtfs_feed(std::string const& directory);

/// As parse_gtfs_feed, from in-memory file contents. `label` prefixes the
/// file names reported in errors.
transit_feed parse_gtfs(gtfs_sources const&, std::string const& label = {});

gtfs_sources serialize_gtfs(transit_feed const&);

void write_gtfs_feed(transit_feed const&, std::string const& directory);

/// Seconds since service-day midnight from "H:MM:SS" (hours may exceed 23).
std::optional<int> parse_gtfs_seconds(std::string_view);

std::string format_gtfs_time(minutes_t);

struct service_minute {
  minutes_t minute_of_day{0};
  bool next_day{false};
};

/// Folds a service-day minute (possibly >= 1440) into [0, 1440).
service_minute normalize_service_minute(minutes_t);

}  // namespace transitepi
