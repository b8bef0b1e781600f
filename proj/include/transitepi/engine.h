#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "transitepi/contact_graph.h"

namespace transitepi {

constexpr auto kInfiniteMinutes = std::numeric_limits<double>::infinity();

struct disease_params {
  double beta{0.05};
  double c_place{1.0};
  double transit_multiplier{1.5};
  double h_threshold{30.0};  // minutes; kInfiniteMinutes disables transit risk
  int latent_days{1};
  int infectious_days{4};
  double saturation_minutes_place{480.0};

  /// Throws config_error on negative rates, h <= 0, latent < 0 or
  /// infectious < 1.
  void validate() const;

  friend bool operator==(disease_params const&,
                         disease_params const&) = default;
};

double contact_rate(location_kind, disease_params const&);

/// clamp01(beta * c(kind) * min(minutes / H(kind), 1)); H is h_threshold on
/// transit and saturation_minutes_place elsewhere.
double pair_infection_prob(minutes_t overlap, location_kind,
                           disease_params const&);

/// 1 - prod(1 - tau).
double infection_force(std::span<double const> taus);

enum class health : std::uint8_t { S, E, I, R };

struct epidemic_state {
  std::uint64_t seed{0};
  std::vector<health> status;
  std::vector<int> entered_on;
  std::vector<person_idx_t> infected_by;  // kInvalidIdx for seeds

  epidemic_state() = default;
  epidemic_state(std::size_t m, std::uint64_t seed);

  std::size_t size() const { return status.size(); }
};

struct daily_counts {
  int day{0};
  std::size_t s{0};
  std::size_t e{0};
  std::size_t i{0};
  std::size_t r{0};
  std::size_t new_infections{0};

  friend bool operator==(daily_counts const&, daily_counts const&) = default;
};

daily_counts count_states(epidemic_state const&, int day);

/// Per-pair infection probabilities of a graph under fixed parameters. Edges
/// between the same pair are pooled into one probability per day.
class transmission_table {
public:
  struct entry {
    person_idx_t neighbor;
    double tau;
  };

  transmission_table(contact_graph const&, disease_params const&);

  std::size_t size() const { return offsets_.size() - 1; }
  std::span<entry const> neighbors(person_idx_t i) const {
    return {entries_.data() + offsets_[i], entries_.data() + offsets_[i + 1]};
  }
  disease_params const& params() const { return params_; }

private:
  disease_params params_;
  std::vector<std::size_t> offsets_;
  std::vector<entry> entries_;
};

/// Advances `state` from day `day` to day + 1 and returns the counts of day
/// + 1. Draws come from per-(person, day) streams, so the result does not
/// depend on evaluation order.
daily_counts step_day(epidemic_state&, transmission_table const&, int day);

/// Same, evaluating every person in the given order.
daily_counts step_day(epidemic_state&, transmission_table const&, int day,
                      std::span<person_idx_t const> order);

/// Seeds `initial_infected` distinct persons as infectious on day 0.
epidemic_state seed_epidemic(std::size_t m, std::size_t initial_infected,
                             std::uint64_t seed);

/// Daily series for days 0..days (days + 1 entries, day 0 is the seeded
/// state). Throws model_error(invalid_horizon) for days = 0 and
/// config_error when initial_infected exceeds the population.
std::vector<daily_counts> run_epidemic(transmission_table const&,
                                       std::size_t initial_infected, int days,
                                       std::uint64_t seed);
std::vector<daily_counts> run_epidemic(contact_graph const&,
                                       disease_params const&,
                                       std::size_t initial_infected, int days,
                                       std::uint64_t seed);

/// Mean number of persons infected directly by one random index case in a
/// fully susceptible population over its infectious period. Trial t uses
/// its own streams, so estimates are monotone in beta for a fixed seed.
double estimate_r0(transmission_table const&, std::size_t trials,
                   std::uint64_t seed);

/// Diagnostic edge transmissibility over the infectious period:
/// 1 - (1 - tau)^infectious_days, averaged over all pairs.
double mean_edge_transmissibility(transmission_table const&);

std::string serialize_daily_counts(std::span<daily_counts const>);

}  // namespace transitepi
