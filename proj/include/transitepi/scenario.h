#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "transitepi/activity.h"
#include "transitepi/contact_graph.h"
#include "transitepi/engine.h"
#include "transitepi/gtfs.h"
#include "transitepi/planner.h"

namespace transitepi {

struct scenario_config {
  double pttcr_reduction{0.0};
  double h_threshold{30.0};  // minutes or kInfiniteMinutes
  std::optional<double> r0_target;
  std::optional<double> beta;
  bool school_closure{false};
  int days{150};
  std::size_t replicates{20};
  std::uint64_t seed{1};

  /// Throws config_error unless exactly one of r0_target / beta is set,
  /// replicates >= 1, days >= 1 and every value is in range.
  void validate() const;

  friend bool operator==(scenario_config const&,
                         scenario_config const&) = default;
};

/// Axes of a scenario grid. Empty axes fall back to the single value of the
/// base scenario.
struct grid_axes {
  std::vector<double> h_values;
  std::vector<double> r0_values;
  std::vector<double> pttcr_values;
  std::vector<bool> closure_values;

  friend bool operator==(grid_axes const&, grid_axes const&) = default;
};

/// Replaces every school stay with a home stay over the same interval at the
/// person's home. Idempotent.
population_dataset apply_school_closure(population_dataset const&);

struct calibration_result {
  double beta{0.0};
  double achieved_r0{0.0};
  int iterations{0};
};

struct calibration_options {
  std::size_t trials{1000};
  double tolerance{0.1};
  int max_iterations{40};
};

/// Bisection on beta in (0, 1] until the empirical R0 (estimate_r0) is
/// within tolerance of the target. `params.beta` is ignored. Throws
/// model_error(unreachable_r0) when beta = 1 stays below the target.
calibration_result calibrate_beta(double r0_target, contact_graph const&,
                                  disease_params const& params,
                                  std::uint64_t seed,
                                  calibration_options const& = {});

std::uint64_t replicate_seed(std::uint64_t master, std::size_t replicate);

/// Population and feed plus everything derived from them that does not
/// depend on disease parameters: itineraries, rider order and cached
/// contact graphs per (pttcr_reduction, school_closure).
class scenario_world {
public:
  scenario_world(population_dataset ds, transit_feed feed,
                 std::uint64_t seed, planner_options = {},
                 contact_build_options = {});

  std::size_t size() const { return base_.size(); }
  population_dataset const& dataset(bool school_closure);
  transit_feed const& feed() const { return planner_.feed(); }

  std::vector<person_idx_t> riders(double pttcr_reduction) const;
  rider_assignment itineraries(double pttcr_reduction, bool school_closure);
  std::vector<contact_event> transit_events(double pttcr_reduction,
                                            bool school_closure);
  contact_graph const& graph(double pttcr_reduction, bool school_closure);

private:
  struct variant {
    population_dataset ds;
    rider_assignment plans;  // every eligible person
    std::vector<contact_event> place_events;
  };
  variant& get_variant(bool school_closure);

  population_dataset base_;
  transit_planner planner_;
  contact_build_options contact_opt_;
  std::vector<person_idx_t> order_;
  std::map<bool, std::unique_ptr<variant>> variants_;
  std::map<std::pair<double, bool>, std::unique_ptr<contact_graph>> graphs_;
};

struct grid_cell {
  double pttcr_reduction{0.0};
  double h_threshold{30.0};
  std::optional<double> r0_target;
  bool school_closure{false};
  double beta{0.0};
};

struct replicate_result {
  std::size_t replicate{0};
  std::uint64_t seed{0};
  double attack_rate{0.0};
  int peak_day{0};
  std::size_t peak_height{0};
};

struct mean_counts {
  int day{0};
  double s{0.0};
  double e{0.0};
  double i{0.0};
  double r{0.0};
  double new_infections{0.0};
};

struct cell_result {
  grid_cell cell;
  std::size_t riders{0};
  std::size_t transit_events{0};
  std::vector<replicate_result> replicates;
  std::vector<mean_counts> curve;  // mean over replicates
  double attack_rate_mean{0.0};
  double attack_rate_sd{0.0};
  int peak_day{0};  // of the mean infectious curve
  double peak_height{0.0};
};

struct calibration_record {
  double r0_target{0.0};
  calibration_result result;
};

struct grid_result {
  std::size_t population{0};
  std::vector<calibration_record> calibrations;
  std::vector<cell_result> cells;
};

struct grid_options {
  std::size_t initial_infected{5};
  calibration_options calibration;
};

/// Attack rate of a series: share of persons no longer susceptible at the
/// end.
double attack_rate(std::vector<daily_counts> const&);

/// Runs every cell of closure x pttcr x h x r0 with `base.replicates`
/// replicates. Replicate r uses replicate_seed(base.seed, r) in every cell.
/// Beta comes from `base.beta` or from calibrating each R0 target once on
/// the unintervened world (no reduction, no closure, h of `base`).
grid_result run_scenario_grid(scenario_world&, scenario_config const& base,
                              disease_params const& disease,
                              grid_axes const& axes,
                              grid_options const& = {});

/// Delimited-text tables of a grid result.
std::string serialize_calibration(grid_result const&);
std::string serialize_summary(grid_result const&);
std::string serialize_replicates(grid_result const&);
std::string serialize_curves(grid_result const&);

std::string format_minutes_or_inf(double);

}  // namespace transitepi
