#include "transitepi/activity.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "fmt/core.h"

#include "transitepi/csv.h"
#include "transitepi/error.h"
#include "transitepi/rng.h"

namespace transitepi {

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  auto const* first = s.data();
  auto const* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') {
    ++first;
  }
  auto const [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    return std::nullopt;
  }
  return value;
}

struct pending_record {
  std::size_t line;
  activity_record record;
};

}  // namespace

std::optional<minutes_t> parse_clock_minutes(std::string_view s) {
  auto const colon = s.find(':');
  if (colon == std::string_view::npos) {
    return parse_number<minutes_t>(s);
  }
  auto const h = parse_number<minutes_t>(s.substr(0, colon));
  auto const m = parse_number<minutes_t>(s.substr(colon + 1));
  if (!h || !m || *h < 0 || *m < 0 || *m >= 60 || *h > 10000) {
    return std::nullopt;
  }
  return *h * 60 + *m;
}

std::size_t population_dataset::activity_count() const {
  return std::accumulate(
      persons.begin(), persons.end(), std::size_t{0},
      [](std::size_t n, person const& p) { return n + p.activities.size(); });
}

std::vector<person_idx_t> draw_transit_eligible(std::size_t n, double fraction,
                                                std::uint64_t seed) {
  auto const count = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(fraction * static_cast<double>(n)), 0,
      static_cast<long long>(n)));
  std::vector<person_idx_t> order(n);
  std::iota(order.begin(), order.end(), person_idx_t{0});
  counter_stream rng{seed, 0, 0, stream_tag::eligibility};
  shuffle(std::span{order}, rng);
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

population_dataset parse_activities(std::string_view text,
                                    std::string const& file_label,
                                    activity_ingest_options const& opt) {
  auto const table = parse_csv(text, file_label);
  auto const& schema = opt.schema;

  auto const col_person = table.column(schema.person);
  auto const col_start = [&] {
    if (auto const c = table.find_column(schema.start); c.has_value()) {
      return *c;
    }
    if (schema.start == "STARTTIME") {
      if (auto const c = table.find_column("STRATTIME"); c.has_value()) {
        return *c;
      }
    }
    return table.column(schema.start);
  }();
  auto const col_duration = table.column(schema.duration);
  auto const col_location = table.column(schema.location);
  auto const col_kind = table.column(schema.kind);
  auto const col_lat = table.find_column(schema.lat);
  auto const col_lon = table.find_column(schema.lon);
  if (col_lat.has_value() != col_lon.has_value()) {
    throw data_error{data_errc::missing_column, file_label, table.header_line,
                     col_lat ? schema.lon : schema.lat};
  }

  population_dataset ds;
  std::unordered_map<std::string, person_idx_t> person_ids;
  std::unordered_map<std::string, location_idx_t> location_ids;
  std::vector<std::vector<pending_record>> pending;

  auto const malformed = [&](csv_row const& row, std::string subject,
                             std::string reason) {
    return data_error{data_errc::malformed_row, file_label, row.line,
                      std::move(subject), std::move(reason)};
  };

  for (auto const& row : table.rows) {
    auto const pid = table.field(row, col_person);
    auto const loc_id = table.field(row, col_location);
    if (pid.empty()) {
      throw malformed(row, schema.person, "empty person id");
    }
    if (loc_id.empty()) {
      throw malformed(row, schema.location, "empty location id");
    }

    auto const start = parse_clock_minutes(table.field(row, col_start));
    if (!start || *start < 0 || *start >= kMinutesPerDay) {
      throw malformed(row, schema.start, "start time must lie in [0, 1440)");
    }
    auto const duration = parse_clock_minutes(table.field(row, col_duration));
    if (!duration || *duration <= 0 || *duration > kMinutesPerDay) {
      throw malformed(row, schema.duration, "duration must lie in (0, 1440]");
    }
    auto const kind = parse_location_kind(table.field(row, col_kind));
    if (!kind || *kind == location_kind::transit) {
      throw malformed(row, schema.kind, "unknown location kind");
    }

    std::optional<geo_point> position;
    if (col_lat) {
      auto const lat_s = table.field(row, *col_lat);
      auto const lon_s = table.field(row, *col_lon);
      if (!lat_s.empty() || !lon_s.empty()) {
        auto const lat = parse_number<double>(lat_s);
        auto const lon = parse_number<double>(lon_s);
        if (!lat || !lon || !(*lat >= -90.0 && *lat <= 90.0) ||
            !(*lon >= -180.0 && *lon <= 180.0)) {
          throw malformed(row, schema.lat, "invalid coordinates");
        }
        position = geo_point{*lat, *lon};
      }
    }

    auto [loc_it, loc_new] = location_ids.try_emplace(
        std::string{loc_id}, static_cast<location_idx_t>(ds.locations.size()));
    if (loc_new) {
      ds.locations.push_back(location{std::string{loc_id}, *kind, position});
    } else {
      auto& loc = ds.locations[loc_it->second];
      if (loc.kind != *kind) {
        throw malformed(row, schema.kind,
                        fmt::format("location {} already has kind {}", loc_id,
                                    to_string(loc.kind)));
      }
      if (position.has_value()) {
        if (loc.position.has_value() && *loc.position != *position) {
          throw malformed(row, schema.lat,
                          fmt::format("conflicting coordinates for {}", loc_id));
        }
        loc.position = position;
      }
    }

    auto [p_it, p_new] = person_ids.try_emplace(
        std::string{pid}, static_cast<person_idx_t>(ds.persons.size()));
    if (p_new) {
      ds.persons.push_back(person{std::string{pid}, kInvalidIdx, {}});
      pending.emplace_back();
    }

    auto const end = *start + *duration;
    auto& recs = pending[p_it->second];
    if (end <= kMinutesPerDay) {
      recs.push_back({row.line,
                      activity_record{*start, *duration, loc_it->second, *kind,
                                      false}});
    } else {
      recs.push_back({row.line,
                      activity_record{*start, kMinutesPerDay - *start,
                                      loc_it->second, *kind, false}});
      recs.push_back({row.line,
                      activity_record{0, end - kMinutesPerDay, loc_it->second,
                                      *kind, true}});
    }
  }

  for (auto i = std::size_t{0}; i < ds.persons.size(); ++i) {
    auto& recs = pending[i];
    auto const first_line = recs.front().line;
    std::stable_sort(recs.begin(), recs.end(),
                     [](pending_record const& a, pending_record const& b) {
                       return a.record.start < b.record.start;
                     });
    auto& p = ds.persons[i];
    for (auto j = std::size_t{0}; j < recs.size(); ++j) {
      if (j != 0 && recs[j].record.start < recs[j - 1].record.end()) {
        throw data_error{data_errc::overlapping_activities, file_label,
                         recs[j].line, p.id};
      }
      if (recs[j].record.kind == location_kind::home &&
          p.home == kInvalidIdx) {
        p.home = recs[j].record.location;
      }
      p.activities.push_back(recs[j].record);
    }
    if (p.home == kInvalidIdx) {
      throw data_error{data_errc::missing_home, file_label, first_line, p.id};
    }
  }

  ds.transit_eligible = draw_transit_eligible(
      ds.persons.size(), opt.transit_fraction, opt.eligibility_seed);
  return ds;
}

population_dataset parse_activity_file(std::string const& path,
                                       activity_ingest_options const& opt) {
  return parse_activities(read_text_file(path), path, opt);
}

std::string serialize_activities(population_dataset const& ds,
                                 activity_schema const& schema) {
  auto const with_coords =
      std::any_of(ds.locations.begin(), ds.locations.end(),
                  [](location const& l) { return l.position.has_value(); });

  std::string out = fmt::format("{},{},{},{},{}", schema.person, schema.start,
                                schema.duration, schema.location, schema.kind);
  if (with_coords) {
    out += fmt::format(",{},{}", schema.lat, schema.lon);
  }
  out += '\n';

  for (auto const& p : ds.persons) {
    auto const& acts = p.activities;
    std::vector<bool> consumed(acts.size(), false);
    for (auto i = std::size_t{0}; i < acts.size(); ++i) {
      auto const& a = acts[i];
      if (a.continues_previous_day) {
        continue;
      }
      auto duration = a.duration;
      if (a.end() == kMinutesPerDay) {
        for (auto j = std::size_t{0}; j < acts.size(); ++j) {
          if (!consumed[j] && acts[j].continues_previous_day &&
              acts[j].location == a.location) {
            duration += acts[j].duration;
            consumed[j] = true;
            break;
          }
        }
      }
      auto const& loc = ds.locations[a.location];
      out += fmt::format("{},{},{},{},{}", csv_escape(p.id), a.start, duration,
                         csv_escape(loc.id), to_string(a.kind));
      if (with_coords) {
        if (loc.position) {
          out += fmt::format(",{},{}", loc.position->lat, loc.position->lon);
        } else {
          out += ",,";
        }
      }
      out += '\n';
    }
    for (auto j = std::size_t{0}; j < acts.size(); ++j) {
      if (acts[j].continues_previous_day && !consumed[j]) {
        auto const& loc = ds.locations[acts[j].location];
        out += fmt::format("{},{},{},{},{}", csv_escape(p.id), acts[j].start,
                           acts[j].duration, csv_escape(loc.id),
                           to_string(acts[j].kind));
        if (with_coords) {
          out += loc.position ? fmt::format(",{},{}", loc.position->lat,
                                            loc.position->lon)
                              : std::string{",,"};
        }
        out += '\n';
      }
    }
  }
  return out;
}

void write_activity_file(population_dataset const& ds, std::string const& path,
                         activity_schema const& schema) {
  std::ofstream out{path, std::ios::binary};
  if (!out) {
    throw data_error{data_errc::missing_file, path, 0, path, "cannot write"};
  }
  out << serialize_activities(ds, schema);
}

}  // namespace transitepi
