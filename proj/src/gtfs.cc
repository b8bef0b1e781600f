#include "transitepi/gtfs.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>

#include "fmt/core.h"

#include "transitepi/csv.h"
#include "transitepi/error.h"

namespace transitepi {

namespace {

constexpr auto kStopsFile = "stops.txt";
constexpr auto kRoutesFile = "routes.txt";
constexpr auto kTripsFile = "trips.txt";
constexpr auto kStopTimesFile = "stop_times.txt";

std::optional<double> parse_double(std::string_view s) {
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return v;
}

struct raw_stop_time {
  std::size_t line;
  int sequence;
  stop_idx_t stop;
  int arrival_s;
  int departure_s;
};

}  // namespace

std::optional<int> parse_gtfs_seconds(std::string_view s) {
  auto const c1 = s.find(':');
  if (c1 == std::string_view::npos) {
    return std::nullopt;
  }
  auto const c2 = s.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    return std::nullopt;
  }
  auto const h = parse_int(s.substr(0, c1));
  auto const m = parse_int(s.substr(c1 + 1, c2 - c1 - 1));
  auto const sec = parse_int(s.substr(c2 + 1));
  if (!h || !m || !sec || *h < 0 || *h > 200 || *m < 0 || *m > 59 ||
      *sec < 0 || *sec > 59) {
    return std::nullopt;
  }
  return *h * 3600 + *m * 60 + *sec;
}

std::string format_gtfs_time(minutes_t m) {
  return fmt::format("{:02}:{:02}:00", m / 60, m % 60);
}

service_minute normalize_service_minute(minutes_t m) {
  return {m % kMinutesPerDay, m >= kMinutesPerDay};
}

std::optional<stop_idx_t> transit_feed::find_stop(std::string_view id) const {
  for (auto i = std::size_t{0}; i < stops.size(); ++i) {
    if (stops[i].id == id) {
      return static_cast<stop_idx_t>(i);
    }
  }
  return std::nullopt;
}

std::optional<run_idx_t> transit_feed::find_run(std::string_view id) const {
  for (auto i = std::size_t{0}; i < runs.size(); ++i) {
    if (runs[i].trip_id == id) {
      return static_cast<run_idx_t>(i);
    }
  }
  return std::nullopt;
}

transit_feed parse_gtfs(gtfs_sources const& src, std::string const& label) {
  auto const file = [&](char const* name) {
    return label.empty() ? std::string{name} : label + "/" + name;
  };

  transit_feed feed;

  // stops
  auto const stops = parse_csv(src.stops, file(kStopsFile), ',');
  std::unordered_map<std::string, stop_idx_t> stop_ids;
  {
    auto const c_id = stops.column("stop_id");
    auto const c_lat = stops.column("stop_lat");
    auto const c_lon = stops.column("stop_lon");
    for (auto const& row : stops.rows) {
      auto const id = std::string{stops.field(row, c_id)};
      auto const lat = parse_double(stops.field(row, c_lat));
      auto const lon = parse_double(stops.field(row, c_lon));
      if (id.empty()) {
        throw data_error{data_errc::malformed_row, stops.file, row.line,
                         "stop_id", "empty stop id"};
      }
      if (!lat || !lon || !(*lat >= -90.0 && *lat <= 90.0) ||
          !(*lon >= -180.0 && *lon <= 180.0)) {
        throw data_error{data_errc::malformed_row, stops.file, row.line,
                         "stop_lat", "invalid coordinates for stop " + id};
      }
      if (!stop_ids.emplace(id, static_cast<stop_idx_t>(feed.stops.size()))
               .second) {
        throw data_error{data_errc::malformed_row, stops.file, row.line,
                         "stop_id", "duplicate stop id " + id};
      }
      feed.stops.push_back(gtfs_stop{id, geo_point{*lat, *lon}});
    }
  }

  // routes
  auto const routes = parse_csv(src.routes, file(kRoutesFile), ',');
  std::unordered_map<std::string, std::size_t> route_ids;
  {
    auto const c_id = routes.column("route_id");
    for (auto const& row : routes.rows) {
      auto const id = std::string{routes.field(row, c_id)};
      if (id.empty()) {
        throw data_error{data_errc::malformed_row, routes.file, row.line,
                         "route_id", "empty route id"};
      }
      if (!route_ids.emplace(id, feed.routes.size()).second) {
        throw data_error{data_errc::malformed_row, routes.file, row.line,
                         "route_id", "duplicate route id " + id};
      }
      feed.routes.push_back(id);
    }
  }

  // trips
  auto const trips = parse_csv(src.trips, file(kTripsFile), ',');
  std::unordered_map<std::string, std::size_t> trip_ids;
  std::vector<std::pair<std::string, std::string>> trip_list;  // trip, route
  std::vector<std::size_t> trip_lines;
  {
    auto const c_trip = trips.column("trip_id");
    auto const c_route = trips.column("route_id");
    for (auto const& row : trips.rows) {
      auto const trip = std::string{trips.field(row, c_trip)};
      auto const route = std::string{trips.field(row, c_route)};
      if (trip.empty()) {
        throw data_error{data_errc::malformed_row, trips.file, row.line,
                         "trip_id", "empty trip id"};
      }
      if (!route_ids.contains(route)) {
        throw data_error{data_errc::dangling_reference, trips.file, row.line,
                         route, "route"};
      }
      if (!trip_ids.emplace(trip, trip_list.size()).second) {
        throw data_error{data_errc::malformed_row, trips.file, row.line,
                         "trip_id", "duplicate trip id " + trip};
      }
      trip_list.emplace_back(trip, route);
      trip_lines.push_back(row.line);
    }
  }

  // stop_times
  auto const st = parse_csv(src.stop_times, file(kStopTimesFile), ',');
  std::vector<std::vector<raw_stop_time>> per_trip(trip_list.size());
  {
    auto const c_trip = st.column("trip_id");
    auto const c_arr = st.column("arrival_time");
    auto const c_dep = st.column("departure_time");
    auto const c_stop = st.column("stop_id");
    auto const c_seq = st.column("stop_sequence");
    for (auto const& row : st.rows) {
      auto const trip = std::string{st.field(row, c_trip)};
      auto const stop = std::string{st.field(row, c_stop)};
      auto const trip_it = trip_ids.find(trip);
      if (trip_it == trip_ids.end()) {
        throw data_error{data_errc::dangling_reference, st.file, row.line,
                         trip, "trip"};
      }
      auto const stop_it = stop_ids.find(stop);
      if (stop_it == stop_ids.end()) {
        throw data_error{data_errc::dangling_reference, st.file, row.line,
                         stop, "stop"};
      }
      auto const arr_s = st.field(row, c_arr);
      auto const dep_s = st.field(row, c_dep);
      if (arr_s.empty() && dep_s.empty()) {
        throw data_error{data_errc::malformed_row, st.file, row.line,
                         "arrival_time", "untimed stops are not supported"};
      }
      auto const arr = parse_gtfs_seconds(arr_s.empty() ? dep_s : arr_s);
      auto const dep = parse_gtfs_seconds(dep_s.empty() ? arr_s : dep_s);
      if (!arr || !dep) {
        throw data_error{data_errc::malformed_row, st.file, row.line,
                         "arrival_time", "expected HH:MM:SS"};
      }
      auto const seq = parse_int(st.field(row, c_seq));
      if (!seq || *seq < 0) {
        throw data_error{data_errc::malformed_row, st.file, row.line,
                         "stop_sequence", "expected a non-negative integer"};
      }
      per_trip[trip_it->second].push_back(
          raw_stop_time{row.line, *seq, stop_it->second, *arr, *dep});
    }
  }

  for (auto t = std::size_t{0}; t < trip_list.size(); ++t) {
    auto& seq = per_trip[t];
    auto const& [trip_id, route_id] = trip_list[t];
    if (seq.empty()) {
      // Trips without stop times carry no service.
      continue;
    }
    std::sort(seq.begin(), seq.end(),
              [](raw_stop_time const& a, raw_stop_time const& b) {
                return a.sequence < b.sequence;
              });
    if (seq.size() < 2) {
      throw data_error{data_errc::too_few_stops, file(kStopTimesFile),
                       seq.front().line, trip_id};
    }
    vehicle_run run{trip_id, route_id, {}};
    for (auto i = std::size_t{0}; i < seq.size(); ++i) {
      auto const& s = seq[i];
      if (i != 0 && s.sequence == seq[i - 1].sequence) {
        throw data_error{data_errc::malformed_row, file(kStopTimesFile), s.line,
                         "stop_sequence", "duplicate stop_sequence"};
      }
      if (s.departure_s < s.arrival_s ||
          (i != 0 && s.arrival_s < seq[i - 1].departure_s)) {
        throw data_error{data_errc::non_monotonic_times, file(kStopTimesFile),
                         s.line, trip_id};
      }
      run.stops.push_back(
          stop_time{s.stop, s.arrival_s / 60, s.departure_s / 60});
    }
    if (seq.back().arrival_s <= seq.front().departure_s) {
      throw data_error{data_errc::non_monotonic_times, file(kStopTimesFile),
                       seq.back().line, trip_id};
    }
    feed.runs.push_back(std::move(run));
  }
  return feed;
}

transit_feed parse_gtfs_feed(std::string const& directory) {
  namespace fs = std::filesystem;
  auto const read = [&](char const* name) {
    auto const path = (fs::path{directory} / name).string();
    if (!fs::exists(path)) {
      throw data_error{data_errc::missing_file, path, 0, name};
    }
    return read_text_file(path);
  };
  gtfs_sources src;
  src.stops = read(kStopsFile);
  src.routes = read(kRoutesFile);
  src.trips = read(kTripsFile);
  src.stop_times = read(kStopTimesFile);
  return parse_gtfs(src, directory);
}

gtfs_sources serialize_gtfs(transit_feed const& feed) {
  gtfs_sources out;
  out.stops = "stop_id,stop_name,stop_lat,stop_lon\n";
  for (auto const& s : feed.stops) {
    out.stops += fmt::format("{},{},{},{}\n", csv_escape(s.id),
                             csv_escape(s.id), s.position.lat, s.position.lon);
  }
  out.routes = "route_id,route_short_name,route_type\n";
  for (auto const& r : feed.routes) {
    out.routes += fmt::format("{},{},3\n", csv_escape(r), csv_escape(r));
  }
  out.trips = "route_id,service_id,trip_id\n";
  out.stop_times = "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n";
  for (auto const& run : feed.runs) {
    out.trips += fmt::format("{},daily,{}\n", csv_escape(run.route_id),
                             csv_escape(run.trip_id));
    for (auto i = std::size_t{0}; i < run.stops.size(); ++i) {
      auto const& s = run.stops[i];
      out.stop_times += fmt::format(
          "{},{},{},{},{}\n", csv_escape(run.trip_id),
          format_gtfs_time(s.arrival), format_gtfs_time(s.departure),
          csv_escape(feed.stops[s.stop].id), i + 1);
    }
  }
  return out;
}

void write_gtfs_feed(transit_feed const& feed, std::string const& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto const src = serialize_gtfs(feed);
  auto const write = [&](char const* name, std::string const& text) {
    std::ofstream out{fs::path{directory} / name, std::ios::binary};
    if (!out) {
      throw data_error{data_errc::missing_file, directory, 0, name,
                       "cannot write"};
    }
    out << text;
  };
  write(kStopsFile, src.stops);
  write(kRoutesFile, src.routes);
  write(kTripsFile, src.trips);
  write(kStopTimesFile, src.stop_times);
}

}  // namespace transitepi
