#include "transitepi/copresence.h"

#include <algorithm>
#include <map>
#include <tuple>

namespace transitepi {

std::vector<vehicle_occupancy> vehicle_occupancies(
    rider_assignment const& riders) {
  std::map<run_idx_t, std::vector<occupancy_interval>> by_run;
  for (auto const& [person, itins] : riders) {
    for (auto const& itin : itins) {
      for (auto const& leg : itin.legs) {
        by_run[leg.run].push_back(
            occupancy_interval{person, leg.board_time, leg.alight_time});
      }
    }
  }
  std::vector<vehicle_occupancy> out;
  out.reserve(by_run.size());
  for (auto& [run, intervals] : by_run) {
    std::sort(intervals.begin(), intervals.end(),
              [](occupancy_interval const& a, occupancy_interval const& b) {
                return std::tie(a.board, a.person, a.alight) <
                       std::tie(b.board, b.person, b.alight);
              });
    out.push_back(vehicle_occupancy{run, std::move(intervals)});
  }
  return out;
}

std::vector<contact_event> compute_copresence(rider_assignment const& riders) {
  auto const occ = vehicle_occupancies(riders);
  std::vector<std::vector<contact_event>> per_run(occ.size());

  auto const n = static_cast<std::ptrdiff_t>(occ.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    auto const& v = occ[static_cast<std::size_t>(r)];
    std::map<std::pair<person_idx_t, person_idx_t>, minutes_t> overlap;
    auto const& iv = v.intervals;
    for (auto a = std::size_t{0}; a < iv.size(); ++a) {
      for (auto b = a + 1; b < iv.size() && iv[b].board < iv[a].alight; ++b) {
        if (iv[a].person == iv[b].person) {
          continue;
        }
        auto const minutes = std::min(iv[a].alight, iv[b].alight) - iv[b].board;
        if (minutes > 0) {
          overlap[std::minmax(iv[a].person, iv[b].person)] += minutes;
        }
      }
    }
    auto& out = per_run[static_cast<std::size_t>(r)];
    for (auto const& [pair, minutes] : overlap) {
      out.push_back(contact_event{pair.first, pair.second,
                                  location_kind::transit,
                                  std::min(minutes, kMinutesPerDay), v.run});
    }
  }

  std::vector<contact_event> events;
  for (auto& v : per_run) {
    events.insert(events.end(), v.begin(), v.end());
  }
  return events;
}

}  // namespace transitepi
