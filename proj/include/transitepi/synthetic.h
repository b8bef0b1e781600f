#pragma once

#include <array>
#include <cstdint>

#include "transitepi/activity.h"
#include "transitepi/gtfs.h"

namespace transitepi {

/// Grid-shaped bus network: `lines_per_axis` east-west and as many
/// north-south lines crossing a square town, served in both directions.
struct synthetic_feed_options {
  geo_point south_west{37.20, -80.45};
  double extent_m{4800.0};
  int lines_per_axis{2};
  double stop_spacing_m{400.0};
  double speed_m_per_min{250.0};
  minutes_t first_departure{6 * 60};
  minutes_t last_departure{22 * 60};
  minutes_t headway{20};
};

transit_feed generate_synthetic_feed(synthetic_feed_options const&,
                                     std::uint64_t seed);

/// Defaults are artifact choices. Only the mean of roughly 5.4 activity
/// records per person and the 20% transit share follow published aggregates.
struct synthetic_population_options {
  double mean_household_size{3.0};
  double student_share{0.25};
  double worker_share{0.55};

  // Split of non-home locations; "other" takes the remainder.
  double work_place_share{0.4};
  double school_place_share{0.15};

  /// P(k additional activities besides home), k = 0..4.
  std::array<double, 5> extra_activity_probs{0.02, 0.04, 0.08, 0.18, 0.68};

  double transit_fraction{0.2};

  minutes_t school_start_mean{480};
  minutes_t school_duration{420};
  minutes_t work_start_mean{510};
  minutes_t work_start_sd{45};
  minutes_t work_duration_mean{480};
  minutes_t work_duration_sd{45};
  minutes_t errand_min{30};
  minutes_t errand_max{120};
  minutes_t travel_gap{15};
  minutes_t latest_errand_start{21 * 60};

  /// Locations are scattered over the feed's bounding box grown by this
  /// margin.
  double margin_m{400.0};
};

/// Builds a synthetic resident population over the area of `feed`.
///
/// `n_locations` counts homes and places together. One location yields a
/// home-only town; 2 or 3 cannot host every place kind and are rejected with
/// data_error(invalid_scale), as are zero persons or an empty feed.
population_dataset generate_synthetic_population(
    std::size_t n_persons, std::size_t n_locations, transit_feed const& feed,
    std::uint64_t seed, synthetic_population_options const& = {});

}  // namespace transitepi
