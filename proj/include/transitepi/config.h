#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transitepi/engine.h"
#include "transitepi/scenario.h"

namespace transitepi {

struct population_config {
  /// Both set: read the activity file and GTFS directory. Both unset:
  /// generate a synthetic town.
  std::optional<std::string> activities;
  std::optional<std::string> gtfs;
  std::size_t synthetic_persons{2000};
  std::optional<std::size_t> synthetic_locations;  // default: homes + 40
  std::optional<std::uint64_t> seed;  // default: the scenario seed
  double transit_fraction{0.2};
  std::size_t initial_infected{5};
  std::optional<std::size_t> max_group_size;

  friend bool operator==(population_config const&,
                         population_config const&) = default;
};

struct simulation_config {
  population_config population;
  disease_params disease;
  scenario_config scenario;
  grid_axes grid;
  std::size_t calibration_trials{1000};

  /// Throws config_error.
  void validate() const;

  friend bool operator==(simulation_config const&,
                         simulation_config const&) = default;
};

/// INI text with [population], [disease], [scenario] and [grid] sections.
/// Relative paths are resolved against `base_dir`. Unknown sections or keys
/// are rejected with config_error.
simulation_config parse_simulation_config(std::string const& text,
                                          std::string const& base_dir = {});
simulation_config load_simulation_config(std::string const& path);

/// Canonical INI text listing every key; parses back to an equal config.
std::string serialize_simulation_config(simulation_config const&);

std::size_t default_synthetic_locations(std::size_t persons);

/// Files read by a config, in a fixed order.
std::vector<std::string> input_files(population_config const&);

scenario_world load_world(simulation_config const&);

/// "inf" or a positive number of minutes.
double parse_minutes_or_inf(std::string const&);

}  // namespace transitepi
