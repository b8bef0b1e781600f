#include "transitepi/planner.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "transitepi/rng.h"

namespace transitepi {

namespace {

constexpr auto kUnreached = std::numeric_limits<minutes_t>::max() / 2;

struct label_parent {
  run_idx_t run{kInvalidIdx};
  std::uint32_t board_pos{0};
  std::uint32_t alight_pos{0};
  int from_round{-1};
  stop_idx_t board_stop{kInvalidIdx};
};

}  // namespace

transit_planner::transit_planner(transit_feed feed, planner_options opt)
    : feed_{std::move(feed)}, opt_{opt}, departures_(feed_.stops.size()) {
  for (auto r = run_idx_t{0}; r < feed_.runs.size(); ++r) {
    auto const& run = feed_.runs[r];
    // The last stop has no onward service.
    for (auto p = std::uint32_t{0}; p + 1 < run.stops.size(); ++p) {
      departures_[run.stops[p].stop].push_back(
          departure{run.stops[p].departure, r, p});
    }
  }
  for (auto& d : departures_) {
    std::stable_sort(d.begin(), d.end(),
                     [](departure const& a, departure const& b) {
                       return a.time < b.time;
                     });
  }
}

std::vector<std::pair<stop_idx_t, minutes_t>> transit_planner::stops_near(
    geo_point const& p) const {
  std::vector<std::pair<stop_idx_t, minutes_t>> near;
  for (auto s = stop_idx_t{0}; s < feed_.stops.size(); ++s) {
    auto const d = distance_m(p, feed_.stops[s].position);
    if (d <= opt_.walk_radius_m) {
      near.emplace_back(
          s, static_cast<minutes_t>(std::ceil(d / opt_.walk_speed_m_per_min)));
    }
  }
  return near;
}

std::optional<transit_itinerary> transit_planner::plan(
    geo_point const& origin, geo_point const& destination,
    minutes_t earliest_departure) const {
  auto const access = stops_near(origin);
  auto const egress = stops_near(destination);
  if (access.empty() || egress.empty()) {
    return std::nullopt;
  }

  auto const n_stops = feed_.stops.size();
  auto const rounds = static_cast<std::size_t>(opt_.max_transfers) + 1;
  std::vector<std::vector<minutes_t>> arrival(
      rounds + 1, std::vector<minutes_t>(n_stops, kUnreached));
  std::vector<std::vector<label_parent>> parent(
      rounds + 1, std::vector<label_parent>(n_stops));

  for (auto const& [s, walk] : access) {
    arrival[0][s] = std::min(arrival[0][s], earliest_departure + walk);
  }

  // Anything at or past midnight does not count as a same-day arrival.
  auto best = kMinutesPerDay;
  auto best_round = std::size_t{0};
  auto best_stop = kInvalidIdx;

  for (auto k = std::size_t{1}; k <= rounds; ++k) {
    for (auto s = stop_idx_t{0}; s < n_stops; ++s) {
      auto ready = kUnreached;
      auto from = -1;
      for (auto j = std::size_t{0}; j < k; ++j) {
        if (arrival[j][s] == kUnreached) {
          continue;
        }
        auto const t = arrival[j][s] + (j > 0 ? opt_.min_transfer : 0);
        if (t < ready) {
          ready = t;
          from = static_cast<int>(j);
        }
      }
      if (ready >= best) {
        continue;
      }

      auto const& deps = departures_[s];
      auto it = std::lower_bound(
          deps.begin(), deps.end(), ready,
          [](departure const& d, minutes_t t) { return d.time < t; });
      for (; it != deps.end() && it->time < best; ++it) {
        auto const& run = feed_.runs[it->run];
        for (auto q = it->pos + 1; q < run.stops.size(); ++q) {
          auto const a = run.stops[q].arrival;
          if (a >= best) {
            break;
          }
          if (a <= it->time) {
            continue;
          }
          auto const st = run.stops[q].stop;
          if (a < arrival[k][st]) {
            arrival[k][st] = a;
            parent[k][st] = label_parent{it->run, it->pos, q, from, s};
          }
        }
      }
    }

    for (auto const& [s, walk] : egress) {
      if (arrival[k][s] != kUnreached && arrival[k][s] + walk < best) {
        best = arrival[k][s] + walk;
        best_round = k;
        best_stop = s;
      }
    }
  }

  if (best_stop == kInvalidIdx) {
    return std::nullopt;
  }

  transit_itinerary itin;
  itin.arrival = best;
  auto k = static_cast<int>(best_round);
  auto s = best_stop;
  while (k > 0) {
    auto const& p = parent[static_cast<std::size_t>(k)][s];
    auto const& run = feed_.runs[p.run];
    itin.legs.push_back(itinerary_leg{p.run, p.board_stop, s,
                                      run.stops[p.board_pos].departure,
                                      run.stops[p.alight_pos].arrival});
    s = p.board_stop;
    k = p.from_round;
  }
  std::reverse(itin.legs.begin(), itin.legs.end());
  return itin;
}

std::optional<transit_itinerary> plan_itinerary(geo_point const& origin,
                                                geo_point const& destination,
                                                minutes_t earliest_departure,
                                                transit_feed const& feed,
                                                planner_options const& opt) {
  return transit_planner{feed, opt}.plan(origin, destination,
                                         earliest_departure);
}

std::size_t rider_count(std::size_t eligible, double pttcr_reduction) {
  auto const keep = (1.0 - std::clamp(pttcr_reduction, 0.0, 1.0)) *
                    static_cast<double>(eligible);
  // Tolerate representation error such as (1 - 0.7) * 200 = 60.000000000000007.
  return std::min(eligible, static_cast<std::size_t>(std::ceil(keep - 1e-9)));
}

std::vector<person_idx_t> rider_order(population_dataset const& ds,
                                      std::uint64_t seed) {
  auto order = ds.transit_eligible;
  counter_stream rng{seed, 0, 0, stream_tag::rider_permutation};
  shuffle(std::span{order}, rng);
  return order;
}

std::vector<transit_itinerary> plan_person_day(population_dataset const& ds,
                                               person_idx_t i,
                                               transit_planner const& planner) {
  std::vector<transit_itinerary> out;
  auto const& acts = ds.persons[i].activities;
  for (auto k = std::size_t{0}; k + 1 < acts.size(); ++k) {
    auto const& from = ds.locations[acts[k].location];
    auto const& to = ds.locations[acts[k + 1].location];
    if (acts[k].location == acts[k + 1].location || !from.position ||
        !to.position ||
        distance_m(*from.position, *to.position) <=
            planner.options().walk_radius_m) {
      continue;
    }
    if (auto itin = planner.plan(*from.position, *to.position, acts[k].end());
        itin.has_value()) {
      itin->person = i;
      out.push_back(std::move(*itin));
    }
  }
  return out;
}

rider_assignment plan_riders(population_dataset const& ds,
                             std::span<person_idx_t const> riders,
                             transit_planner const& planner) {
  std::vector<std::vector<transit_itinerary>> plans(riders.size());
  auto const n = static_cast<std::ptrdiff_t>(riders.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    plans[static_cast<std::size_t>(r)] =
        plan_person_day(ds, riders[static_cast<std::size_t>(r)], planner);
  }
  rider_assignment out;
  for (auto r = std::size_t{0}; r < riders.size(); ++r) {
    out.emplace(riders[r], std::move(plans[r]));
  }
  return out;
}

rider_assignment assign_rider_itineraries(population_dataset const& ds,
                                          transit_planner const& planner,
                                          double pttcr_reduction,
                                          std::uint64_t seed) {
  auto order = rider_order(ds, seed);
  order.resize(rider_count(order.size(), pttcr_reduction));
  return plan_riders(ds, order, planner);
}

}  // namespace transitepi
