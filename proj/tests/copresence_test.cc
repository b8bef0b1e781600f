#include <map>
#include <set>
#include <tuple>

#include "gtest/gtest.h"

#include "transitepi/copresence.h"
#include "transitepi/rng.h"
#include "transitepi/synthetic.h"

using namespace transitepi;

namespace {

transit_itinerary ride(person_idx_t p, run_idx_t run, minutes_t board,
                       minutes_t alight) {
  return {p, {{run, 0, 1, board, alight}}, alight};
}

}  // namespace

TEST(copresence, interval_intersection) {
  rider_assignment a{{0, {ride(0, 3, 480, 500)}}, {1, {ride(1, 3, 490, 510)}}};
  auto const ev = compute_copresence(a);
  ASSERT_EQ(ev.size(), 1U);
  EXPECT_EQ(ev[0].i, 0U);
  EXPECT_EQ(ev[0].j, 1U);
  EXPECT_EQ(ev[0].kind, location_kind::transit);
  EXPECT_EQ(ev[0].minutes, 10);
  EXPECT_EQ(ev[0].place, 3U);
}

TEST(copresence, different_trips_do_not_mix) {
  rider_assignment a{{0, {ride(0, 3, 480, 500)}}, {1, {ride(1, 4, 480, 500)}}};
  EXPECT_TRUE(compute_copresence(a).empty());
}

TEST(copresence, disjoint_windows_do_not_mix) {
  rider_assignment a{{0, {ride(0, 3, 480, 490)}}, {1, {ride(1, 3, 490, 500)}}};
  EXPECT_TRUE(compute_copresence(a).empty());
}

TEST(copresence, three_riders) {
  rider_assignment a{{0, {ride(0, 1, 480, 500)}},
                     {1, {ride(1, 1, 480, 500)}},
                     {2, {ride(2, 1, 480, 500)}}};
  EXPECT_EQ(compute_copresence(a).size(), 3U);
}

TEST(copresence, matches_brute_force) {
  for (auto seed = 0U; seed < 20; ++seed) {
    counter_stream rng{seed, 0, 0, stream_tag::fuzz};
    rider_assignment a;
    for (auto p = person_idx_t{0}; p < 40; ++p) {
      auto& itins = a[p];
      for (auto k = 0; k < 3; ++k) {
        auto const b = static_cast<minutes_t>(400 + rng.below(200));
        itins.push_back(ride(p, static_cast<run_idx_t>(rng.below(5)), b,
                             b + 1 + static_cast<minutes_t>(rng.below(40))));
      }
    }
    std::map<std::tuple<run_idx_t, person_idx_t, person_idx_t>, minutes_t> want;
    for (auto const& [p, ip] : a) {
      for (auto const& [q, iq] : a) {
        if (p >= q) {
          continue;
        }
        for (auto const& x : ip) {
          for (auto const& y : iq) {
            auto const& lx = x.legs[0];
            auto const& ly = y.legs[0];
            auto const o = std::min(lx.alight_time, ly.alight_time) -
                           std::max(lx.board_time, ly.board_time);
            if (lx.run == ly.run && o > 0) {
              want[{lx.run, p, q}] += o;
            }
          }
        }
      }
    }
    auto const ev = compute_copresence(a);
    ASSERT_EQ(ev.size(), want.size());
    for (auto k = std::size_t{0}; k < ev.size(); ++k) {
      EXPECT_EQ(want.at({ev[k].place, ev[k].i, ev[k].j}), ev[k].minutes);
      if (k > 0) {
        EXPECT_LT(std::tie(ev[k - 1].place, ev[k - 1].i, ev[k - 1].j),
                  std::tie(ev[k].place, ev[k].i, ev[k].j));
      }
    }
  }
}

TEST(copresence, conservation_and_reduction_monotonicity) {
  auto const feed = generate_synthetic_feed({}, 6);
  auto const ds = generate_synthetic_population(1500, 540, feed, 6);
  transit_planner const planner{feed};

  auto const all = assign_rider_itineraries(ds, planner, 0.0, 3);
  auto const ev = compute_copresence(all);
  std::map<person_idx_t, minutes_t> contact_minutes;
  std::map<person_idx_t, std::set<person_idx_t>> co_riders;
  for (auto const& e : ev) {
    contact_minutes[e.i] += e.minutes;
    contact_minutes[e.j] += e.minutes;
    co_riders[e.i].insert(e.j);
    co_riders[e.j].insert(e.i);
  }
  for (auto const& [p, minutes] : contact_minutes) {
    auto riding = 0;
    for (auto const& it : all.at(p)) {
      for (auto const& leg : it.legs) {
        riding += leg.alight_time - leg.board_time;
      }
    }
    EXPECT_LE(minutes, static_cast<minutes_t>(co_riders[p].size()) * riding);
  }

  auto last = ev.size();
  for (auto const r : {0.25, 0.5, 0.75, 0.9, 1.0}) {
    auto const n = compute_copresence(assign_rider_itineraries(ds, planner, r, 3))
                       .size();
    EXPECT_LE(n, last) << r;
    last = n;
  }
  EXPECT_EQ(last, 0U);
  EXPECT_GT(ev.size(), 0U);
}
