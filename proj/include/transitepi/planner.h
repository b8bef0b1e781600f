#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "transitepi/activity.h"
#include "transitepi/gtfs.h"

namespace transitepi {

struct itinerary_leg {
  run_idx_t run{kInvalidIdx};
  stop_idx_t board_stop{kInvalidIdx};
  stop_idx_t alight_stop{kInvalidIdx};
  minutes_t board_time{0};
  minutes_t alight_time{0};

  friend bool operator==(itinerary_leg const&, itinerary_leg const&) = default;
};

struct transit_itinerary {
  person_idx_t person{kInvalidIdx};
  std::vector<itinerary_leg> legs;
  minutes_t arrival{0};  // at the destination, after the final walk

  friend bool operator==(transit_itinerary const&,
                         transit_itinerary const&) = default;
};

struct planner_options {
  double walk_radius_m{800.0};
  double walk_speed_m_per_min{80.0};
  int max_transfers{1};
  minutes_t min_transfer{0};
};

/// Earliest-arrival journey planner over a parsed feed. Runs a round-based
/// scan (one round per leg) from the stops within walking distance of the
/// origin. Transfers happen at a single stop. Immutable after construction.
class transit_planner {
public:
  explicit transit_planner(transit_feed feed, planner_options opt = {});

  /// Earliest arrival at `destination` departing `origin` no earlier than
  /// `earliest_departure`, or nullopt when nothing arrives before midnight.
  std::optional<transit_itinerary> plan(geo_point const& origin,
                                        geo_point const& destination,
                                        minutes_t earliest_departure) const;

  /// Stops within the walk radius, with walking minutes (rounded up).
  std::vector<std::pair<stop_idx_t, minutes_t>> stops_near(
      geo_point const&) const;

  transit_feed const& feed() const { return feed_; }
  planner_options const& options() const { return opt_; }

private:
  struct departure {
    minutes_t time;
    run_idx_t run;
    std::uint32_t pos;
  };

  transit_feed feed_;
  planner_options opt_;
  std::vector<std::vector<departure>> departures_;  // per stop, by time
};

std::optional<transit_itinerary> plan_itinerary(geo_point const& origin,
                                                geo_point const& destination,
                                                minutes_t earliest_departure,
                                                transit_feed const& feed,
                                                planner_options const& = {});

using rider_assignment = std::map<person_idx_t, std::vector<transit_itinerary>>;

/// Number of riders kept from `eligible` persons under a reduction:
/// ceil((1 - reduction) * eligible).
std::size_t rider_count(std::size_t eligible, double pttcr_reduction);

/// Eligible persons in a seeded random order. Every reduction level keeps a
/// prefix of this order, so rider sets are nested across levels.
std::vector<person_idx_t> rider_order(population_dataset const&,
                                      std::uint64_t seed);

/// Itineraries for one person's day: one per hop between consecutive stays
/// at distinct locations that are further apart than the walk radius and
/// have a feasible plan.
std::vector<transit_itinerary> plan_person_day(population_dataset const&,
                                               person_idx_t,
                                               transit_planner const&);

/// Plans the day of every rider in `riders`; riders without any feasible
/// hop map to an empty list.
rider_assignment plan_riders(population_dataset const&,
                             std::span<person_idx_t const> riders,
                             transit_planner const&);

rider_assignment assign_rider_itineraries(population_dataset const&,
                                          transit_planner const&,
                                          double pttcr_reduction,
                                          std::uint64_t seed);

}  // namespace transitepi
