#pragma once

#include <utility>
#include <vector>

#include "transitepi/contact_graph.h"
#include "transitepi/planner.h"

namespace transitepi {

struct occupancy_interval {
  person_idx_t person{kInvalidIdx};
  minutes_t board{0};
  minutes_t alight{0};
};

/// Riders aboard one run, ordered by (board, person).
struct vehicle_occupancy {
  run_idx_t run{kInvalidIdx};
  std::vector<occupancy_interval> intervals;
};

/// Occupancy of every run that carries at least one rider, ordered by run.
std::vector<vehicle_occupancy> vehicle_occupancies(rider_assignment const&);

/// One transit contact per unordered pair of riders on the same run with
/// overlapping [board, alight) intervals. `place` holds the run index.
/// Sorted by (run, i, j).
std::vector<contact_event> compute_copresence(rider_assignment const&);

}  // namespace transitepi
