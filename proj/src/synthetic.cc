#include "transitepi/synthetic.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "fmt/core.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"

namespace transitepi {

namespace {

constexpr auto kMetersPerDegreeLat = 111320.0;

geo_point offset(geo_point const& origin, double east_m, double north_m) {
  auto const lat = origin.lat + north_m / kMetersPerDegreeLat;
  auto const lon =
      origin.lon + east_m / (kMetersPerDegreeLat *
                             std::cos(origin.lat * std::numbers::pi / 180.0));
  return {lat, lon};
}

enum class role { student, worker, other };

}  // namespace

transit_feed generate_synthetic_feed(synthetic_feed_options const& opt,
                                     std::uint64_t seed) {
  if (opt.lines_per_axis < 1 || opt.extent_m <= 0.0 ||
      opt.stop_spacing_m <= 0.0 || opt.speed_m_per_min <= 0.0 ||
      opt.headway <= 0) {
    throw config_error{"synthetic feed options must be positive"};
  }
  auto const n_lines = opt.lines_per_axis;
  std::vector<double> line_pos;
  for (auto j = 0; j < n_lines; ++j) {
    line_pos.push_back(opt.extent_m * (j + 1) / (n_lines + 1));
  }

  transit_feed feed;
  std::map<std::string, stop_idx_t> stop_index;
  auto const add_stop = [&](std::string const& id, double x, double y) {
    auto const [it, inserted] =
        stop_index.try_emplace(id, static_cast<stop_idx_t>(feed.stops.size()));
    if (inserted) {
      feed.stops.push_back(gtfs_stop{id, offset(opt.south_west, x, y)});
    }
    return it->second;
  };

  struct line_stops {
    std::string route;
    std::vector<stop_idx_t> stops;
    std::vector<double> along;
  };
  std::vector<line_stops> lines;

  for (auto axis = 0; axis < 2; ++axis) {
    for (auto j = 0; j < n_lines; ++j) {
      std::vector<double> along;
      for (auto k = 0; k * opt.stop_spacing_m <= opt.extent_m + 1e-9; ++k) {
        along.push_back(k * opt.stop_spacing_m);
      }
      along.insert(along.end(), line_pos.begin(), line_pos.end());
      std::sort(along.begin(), along.end());
      along.erase(std::unique(along.begin(), along.end(),
                              [](double a, double b) {
                                return std::abs(a - b) < 1e-6;
                              }),
                  along.end());

      line_stops ls{fmt::format("{}{}", axis == 0 ? "EW" : "NS", j + 1), {},
                    along};
      for (auto k = std::size_t{0}; k < along.size(); ++k) {
        auto const cross = std::find_if(
            line_pos.begin(), line_pos.end(),
            [&](double p) { return std::abs(p - along[k]) < 1e-6; });
        auto const x = axis == 0 ? along[k] : line_pos[j];
        auto const y = axis == 0 ? line_pos[j] : along[k];
        if (cross != line_pos.end()) {
          auto const v = cross - line_pos.begin();
          auto const h = j;
          // Crossing stops are shared by both lines.
          ls.stops.push_back(add_stop(
              axis == 0 ? fmt::format("X{}_{}", h + 1, v + 1)
                        : fmt::format("X{}_{}", v + 1, h + 1),
              x, y));
        } else {
          ls.stops.push_back(add_stop(
              fmt::format("{}{}_{}", axis == 0 ? "E" : "N", j + 1, k), x, y));
        }
      }
      lines.push_back(std::move(ls));
    }
  }

  counter_stream rng{seed, 0, 0, stream_tag::synthetic_feed};
  for (auto const& line : lines) {
    feed.routes.push_back(line.route);
    for (auto dir = 0; dir < 2; ++dir) {
      std::vector<std::size_t> order(line.stops.size());
      for (auto k = std::size_t{0}; k < order.size(); ++k) {
        order[k] = dir == 0 ? k : order.size() - 1 - k;
      }
      auto const phase = static_cast<minutes_t>(
          rng.below(static_cast<std::uint64_t>(opt.headway)));
      auto trip_no = 0;
      for (auto dep = opt.first_departure + phase; dep <= opt.last_departure;
           dep += opt.headway, ++trip_no) {
        vehicle_run run{
            fmt::format("{}_{}_{:03}", line.route, dir == 0 ? "A" : "B",
                        trip_no),
            line.route,
            {}};
        auto t = dep;
        for (auto k = std::size_t{0}; k < order.size(); ++k) {
          if (k != 0) {
            auto const d = std::abs(line.along[order[k]] -
                                    line.along[order[k - 1]]);
            t += std::max(1, static_cast<minutes_t>(
                                 std::lround(d / opt.speed_m_per_min)));
          }
          run.stops.push_back(stop_time{line.stops[order[k]], t, t});
        }
        feed.runs.push_back(std::move(run));
      }
    }
  }
  return feed;
}

population_dataset generate_synthetic_population(
    std::size_t n_persons, std::size_t n_locations, transit_feed const& feed,
    std::uint64_t seed, synthetic_population_options const& opt) {
  if (n_persons == 0) {
    throw data_error{data_errc::invalid_scale, {}, 0, "n_persons",
                     "at least one person is required"};
  }
  if (feed.stops.empty()) {
    throw data_error{data_errc::invalid_scale, {}, 0, "feed",
                     "feed has no stops"};
  }
  if (n_locations == 0 || (n_locations > 1 && n_locations < kPlaceKinds.size())) {
    throw data_error{
        data_errc::invalid_scale, {}, 0, "n_locations",
        fmt::format("{} locations cannot host the {} location kinds",
                    n_locations, kPlaceKinds.size())};
  }

  // Area: bounding box of the stops plus a margin.
  auto lat_min = feed.stops.front().position.lat;
  auto lat_max = lat_min;
  auto lon_min = feed.stops.front().position.lon;
  auto lon_max = lon_min;
  for (auto const& s : feed.stops) {
    lat_min = std::min(lat_min, s.position.lat);
    lat_max = std::max(lat_max, s.position.lat);
    lon_min = std::min(lon_min, s.position.lon);
    lon_max = std::max(lon_max, s.position.lon);
  }
  auto const sw = offset({lat_min, lon_min}, -opt.margin_m, -opt.margin_m);
  auto const ne = offset({lat_max, lon_max}, opt.margin_m, opt.margin_m);

  auto const n_homes =
      n_locations == 1
          ? std::size_t{1}
          : std::clamp<std::size_t>(
                static_cast<std::size_t>(std::ceil(
                    static_cast<double>(n_persons) / opt.mean_household_size)),
                1, n_locations - 3);
  auto const n_places = n_locations - n_homes;
  auto n_work = std::size_t{0};
  auto n_school = std::size_t{0};
  if (n_places != 0) {
    n_work = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::lround(opt.work_place_share * n_places)));
    n_school = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::lround(opt.school_place_share * n_places)));
    while (n_work + n_school >= n_places) {
      (n_work >= n_school ? n_work : n_school) -= 1;
    }
  }
  auto const n_other = n_places - n_work - n_school;

  population_dataset ds;
  counter_stream loc_rng{seed, 0, 1, stream_tag::synthetic_population};
  auto const add_locations = [&](std::size_t n, location_kind kind) {
    auto const first = static_cast<location_idx_t>(ds.locations.size());
    for (auto i = std::size_t{0}; i < n; ++i) {
      auto const lat = sw.lat + loc_rng.uniform() * (ne.lat - sw.lat);
      auto const lon = sw.lon + loc_rng.uniform() * (ne.lon - sw.lon);
      ds.locations.push_back(location{fmt::format("L{}", ds.locations.size()),
                                      kind, geo_point{lat, lon}});
    }
    return first;
  };
  auto const home0 = add_locations(n_homes, location_kind::home);
  auto const work0 = add_locations(n_work, location_kind::work);
  auto const school0 = add_locations(n_school, location_kind::school);
  auto const other0 = add_locations(n_other, location_kind::other);

  auto const clamp_minutes = [](double v, minutes_t lo, minutes_t hi) {
    return static_cast<minutes_t>(
        std::clamp<double>(std::round(v), static_cast<double>(lo),
                           static_cast<double>(hi)));
  };

  ds.persons.reserve(n_persons);
  for (auto i = std::size_t{0}; i < n_persons; ++i) {
    counter_stream rng{seed, static_cast<std::uint32_t>(i), 0,
                       stream_tag::synthetic_population};
    person p;
    p.id = fmt::format("{}", i + 1);
    p.home = home0 + static_cast<location_idx_t>(
                         i < n_homes ? i : rng.below(n_homes));

    auto const u = rng.uniform();
    auto const r = u < opt.student_share                      ? role::student
                   : u < opt.student_share + opt.worker_share ? role::worker
                                                              : role::other;
    auto extra = std::size_t{0};
    {
      auto x = rng.uniform();
      while (extra + 1 < opt.extra_activity_probs.size() &&
             x >= opt.extra_activity_probs[extra]) {
        x -= opt.extra_activity_probs[extra];
        ++extra;
      }
    }

    if (extra == 0 || n_places == 0) {
      p.activities.push_back(activity_record{0, kMinutesPerDay, p.home,
                                             location_kind::home, false});
      ds.persons.push_back(std::move(p));
      continue;
    }

    minutes_t start{};
    minutes_t duration{};
    location_idx_t primary{};
    location_kind kind{};
    switch (r) {
      case role::student:
        start = clamp_minutes(opt.school_start_mean + 15.0 * rng.normal(), 300,
                              720);
        duration = opt.school_duration;
        primary = school0 + static_cast<location_idx_t>(rng.below(n_school));
        kind = location_kind::school;
        break;
      case role::worker:
        start = clamp_minutes(opt.work_start_mean + opt.work_start_sd * rng.normal(),
                              300, 720);
        duration = clamp_minutes(
            opt.work_duration_mean + opt.work_duration_sd * rng.normal(), 120,
            660);
        primary = work0 + static_cast<location_idx_t>(rng.below(n_work));
        kind = location_kind::work;
        break;
      case role::other:
        start = 540 + static_cast<minutes_t>(rng.below(180));
        duration = opt.errand_min + static_cast<minutes_t>(rng.below(
                                        static_cast<std::uint64_t>(
                                            opt.errand_max - opt.errand_min + 1)));
        primary = other0 + static_cast<location_idx_t>(rng.below(n_other));
        kind = location_kind::other;
        break;
    }

    p.activities.push_back(
        activity_record{0, start, p.home, location_kind::home, false});
    p.activities.push_back(
        activity_record{start, duration, primary, kind, false});
    auto t = start + duration + opt.travel_gap;
    auto last = primary;
    for (auto e = std::size_t{1}; e < extra; ++e) {
      auto const d =
          opt.errand_min + static_cast<minutes_t>(rng.below(
                               static_cast<std::uint64_t>(
                                   opt.errand_max - opt.errand_min + 1)));
      if (t > opt.latest_errand_start ||
          t + d + opt.travel_gap >= kMinutesPerDay) {
        break;
      }
      auto loc = other0 + static_cast<location_idx_t>(rng.below(n_other));
      if (loc == last && n_other > 1) {
        loc = other0 + static_cast<location_idx_t>(
                           (loc - other0 + 1 + rng.below(n_other - 1)) % n_other);
      }
      p.activities.push_back(
          activity_record{t, d, loc, location_kind::other, false});
      last = loc;
      t += d + opt.travel_gap;
    }
    if (t < kMinutesPerDay) {
      p.activities.push_back(activity_record{t, kMinutesPerDay - t, p.home,
                                             location_kind::home, false});
    }
    ds.persons.push_back(std::move(p));
  }

  ds.transit_eligible =
      draw_transit_eligible(n_persons, opt.transit_fraction, mix_seed(seed, 1));
  return ds;
}

}  // namespace transitepi
