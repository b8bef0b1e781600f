#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transitepi/types.h"

namespace transitepi {

/// One stay of one person at one location within the repeating day.
struct activity_record {
  minutes_t start{0};
  minutes_t duration{0};
  location_idx_t location{kInvalidIdx};
  location_kind kind{location_kind::home};

  /// Set on the [0, x) remainder of a stay that crossed midnight.
  bool continues_previous_day{false};

  minutes_t end() const { return start + duration; }

  friend bool operator==(activity_record const&,
                         activity_record const&) = default;
};

struct location {
  std::string id;
  location_kind kind{location_kind::other};
  std::optional<geo_point> position;

  friend bool operator==(location const&, location const&) = default;
};

struct person {
  std::string id;
  location_idx_t home{kInvalidIdx};
  std::vector<activity_record> activities;  // sorted, non-overlapping

  friend bool operator==(person const&, person const&) = default;
};

struct population_dataset {
  std::vector<person> persons;
  std::vector<location> locations;
  std::vector<person_idx_t> transit_eligible;  // ascending

  std::size_t size() const { return persons.size(); }
  std::size_t activity_count() const;

  friend bool operator==(population_dataset const&,
                         population_dataset const&) = default;
};

/// Column names of the resident activity file. STARTTIME also matches the
/// STRATTIME spelling found in some source data.
struct activity_schema {
  std::string person{"PID"};
  std::string start{"STARTTIME"};
  std::string duration{"DURATION"};
  std::string location{"LOCATION"};
  std::string kind{"LOCKIND"};
  std::string lat{"LAT"};  // optional column
  std::string lon{"LON"};  // optional column
};

struct activity_ingest_options {
  activity_schema schema;
  double transit_fraction{0.2};
  std::uint64_t eligibility_seed{0};
};

/// Parses a comma- or tab-delimited resident activity file.
///
/// Stays that cross midnight are split into [start, 1440) and a [0, rest)
/// record flagged `continues_previous_day`. Throws data_error on missing
/// columns, malformed rows, overlapping stays and persons without a home.
population_dataset parse_activity_file(std::string const& path,
                                       activity_ingest_options const& = {});

population_dataset parse_activities(std::string_view text,
                                    std::string const& file_label,
                                    activity_ingest_options const& = {});

/// Inverse of parse_activities. Midnight-split stays are written back as a
/// single row.
std::string serialize_activities(population_dataset const&,
                                 activity_schema const& = {});

void write_activity_file(population_dataset const&, std::string const& path,
                         activity_schema const& = {});

/// Fixed-fraction eligibility draw: exactly round(fraction * n) persons,
/// chosen by a seeded permutation. Result is ascending.
std::vector<person_idx_t> draw_transit_eligible(std::size_t n, double fraction,
                                                std::uint64_t seed);

/// Minutes since midnight from "HH:MM" or an integer minute count.
std::optional<minutes_t> parse_clock_minutes(std::string_view);

}  // namespace transitepi
