#include <algorithm>
#include <cmath>
#include <set>

#include "gtest/gtest.h"

#include "transitepi/planner.h"
#include "transitepi/rng.h"
#include "transitepi/synthetic.h"

using namespace transitepi;

namespace {

constexpr geo_point kA{37.0, -80.0};
constexpr geo_point kB{37.05, -80.0};  // about 5.6 km north of A

transit_feed two_stop_feed(std::vector<std::pair<minutes_t, minutes_t>> trips) {
  transit_feed f;
  f.stops = {{"A", kA}, {"B", kB}};
  f.routes = {"R"};
  auto k = 0;
  for (auto const& [dep, arr] : trips) {
    f.runs.push_back(vehicle_run{"T" + std::to_string(k++), "R",
                                 {{0, dep, dep}, {1, arr, arr}}});
  }
  return f;
}

// Earliest same-day arrival over every itinerary with at most two legs.
std::optional<minutes_t> brute_force_arrival(transit_feed const& feed,
                                             transit_planner const& planner,
                                             geo_point const& from,
                                             geo_point const& to,
                                             minutes_t t0) {
  auto const access = planner.stops_near(from);
  auto const egress = planner.stops_near(to);
  auto const egress_walk = [&](stop_idx_t s) -> std::optional<minutes_t> {
    for (auto const& [e, w] : egress) {
      if (e == s) {
        return w;
      }
    }
    return std::nullopt;
  };
  std::optional<minutes_t> best;
  auto const offer = [&](minutes_t arrival, stop_idx_t s) {
    if (auto const w = egress_walk(s); w && arrival + *w < kMinutesPerDay) {
      if (!best || arrival + *w < *best) {
        best = arrival + *w;
      }
    }
  };
  for (auto const& [s0, w0] : access) {
    for (auto const& r1 : feed.runs) {
      for (auto p = std::size_t{0}; p < r1.stops.size(); ++p) {
        if (r1.stops[p].stop != s0 || r1.stops[p].departure < t0 + w0) {
          continue;
        }
        for (auto q = p + 1; q < r1.stops.size(); ++q) {
          auto const a1 = r1.stops[q].arrival;
          if (a1 <= r1.stops[p].departure) {
            continue;
          }
          offer(a1, r1.stops[q].stop);
          for (auto const& r2 : feed.runs) {
            for (auto p2 = std::size_t{0}; p2 < r2.stops.size(); ++p2) {
              if (r2.stops[p2].stop != r1.stops[q].stop ||
                  r2.stops[p2].departure < a1) {
                continue;
              }
              for (auto q2 = p2 + 1; q2 < r2.stops.size(); ++q2) {
                if (r2.stops[q2].arrival > r2.stops[p2].departure) {
                  offer(r2.stops[q2].arrival, r2.stops[q2].stop);
                }
              }
            }
          }
        }
      }
    }
  }
  return best;
}

transit_feed random_feed(std::uint64_t seed) {
  counter_stream rng{seed, 0, 0, stream_tag::fuzz};
  transit_feed f;
  auto const n_stops = 4 + rng.below(6);
  for (auto s = 0U; s < n_stops; ++s) {
    f.stops.push_back({"S" + std::to_string(s),
                       {37.0 + 0.08 * rng.uniform(), -80.0 + 0.1 * rng.uniform()}});
  }
  f.routes = {"R"};
  auto const n_runs = 3 + rng.below(10);
  for (auto r = 0U; r < n_runs; ++r) {
    vehicle_run run{"T" + std::to_string(r), "R", {}};
    std::vector<stop_idx_t> order(n_stops);
    for (auto s = 0U; s < n_stops; ++s) {
      order[s] = s;
    }
    shuffle(std::span{order}, rng);
    auto const len = 2 + rng.below(std::min<std::uint64_t>(4, n_stops - 1));
    auto t = static_cast<minutes_t>(300 + rng.below(1200));
    for (auto k = 0U; k < len; ++k) {
      auto const dwell = static_cast<minutes_t>(rng.below(3));
      run.stops.push_back({order[k], t, t + dwell});
      t += dwell + static_cast<minutes_t>(rng.below(30));  // may be 0
    }
    if (run.stops.back().arrival <= run.stops.front().departure) {
      run.stops.back().arrival = run.stops.front().departure + 1;
      run.stops.back().departure = run.stops.back().arrival;
    }
    f.runs.push_back(std::move(run));
  }
  return f;
}

}  // namespace

TEST(planner, single_feasible_trip) {
  auto const feed = two_stop_feed({{480, 490}});
  auto const itin = plan_itinerary(kA, kB, 450, feed);
  ASSERT_TRUE(itin.has_value());
  ASSERT_EQ(itin->legs.size(), 1U);
  EXPECT_EQ(itin->legs[0].board_time, 480);
  EXPECT_EQ(itin->legs[0].alight_time, 490);
  EXPECT_EQ(itin->arrival, 490);
}

TEST(planner, no_service_after_departure) {
  auto const feed = two_stop_feed({{480, 490}});
  EXPECT_FALSE(plan_itinerary(kA, kB, 540, feed).has_value());
}

TEST(planner, picks_earliest_arrival) {
  auto const feed = two_stop_feed({{470, 505}, {475, 490}});
  auto const itin = plan_itinerary(kA, kB, 450, feed);
  ASSERT_TRUE(itin.has_value());
  EXPECT_EQ(itin->arrival, 490);
  EXPECT_EQ(itin->legs[0].run, 1U);
}

TEST(planner, arrivals_past_midnight_do_not_count) {
  auto const feed = two_stop_feed({{1430, 1450}});
  EXPECT_FALSE(plan_itinerary(kA, kB, 1400, feed).has_value());
}

TEST(planner, walking_time_rounds_up) {
  transit_planner const p{two_stop_feed({{480, 490}})};
  // 0.001 degree of latitude is about 111 m, i.e. 2 minutes at 80 m/min.
  auto const near = p.stops_near({37.001, -80.0});
  ASSERT_EQ(near.size(), 1U);
  EXPECT_EQ(near[0].second, 2);
}

TEST(planner, one_transfer) {
  transit_feed f;
  f.stops = {{"A", kA}, {"M", {37.05, -80.05}}, {"B", {37.1, -80.05}}};
  f.routes = {"R"};
  f.runs.push_back({"T1", "R", {{0, 480, 480}, {1, 500, 500}}});
  f.runs.push_back({"T2", "R", {{1, 505, 505}, {2, 520, 520}}});
  auto const itin = plan_itinerary(kA, {37.1, -80.05}, 470, f);
  ASSERT_TRUE(itin.has_value());
  ASSERT_EQ(itin->legs.size(), 2U);
  EXPECT_EQ(itin->legs[0].alight_stop, itin->legs[1].board_stop);
  EXPECT_EQ(itin->arrival, 520);

  planner_options direct;
  direct.max_transfers = 0;
  EXPECT_FALSE(plan_itinerary(kA, {37.1, -80.05}, 470, f, direct).has_value());
}

TEST(planner, matches_exhaustive_enumeration) {
  auto checked = 0;
  for (auto seed = 0U; seed < 300; ++seed) {
    auto const feed = random_feed(seed);
    transit_planner const planner{feed};
    counter_stream rng{seed, 1, 0, stream_tag::fuzz};
    for (auto q = 0; q < 10; ++q) {
      auto const from = feed.stops[rng.below(feed.stops.size())].position;
      auto const to = feed.stops[rng.below(feed.stops.size())].position;
      auto const t0 = static_cast<minutes_t>(280 + rng.below(1100));
      auto const expect = brute_force_arrival(feed, planner, from, to, t0);
      auto const got = planner.plan(from, to, t0);
      ASSERT_EQ(got.has_value(), expect.has_value()) << seed << " " << q;
      if (!got) {
        continue;
      }
      ++checked;
      EXPECT_EQ(got->arrival, *expect) << seed << " " << q;
      ASSERT_LE(got->legs.size(), 2U);
      auto prev_alight = t0;
      for (auto const& leg : got->legs) {
        auto const& run = feed.runs[leg.run];
        auto const b = std::find_if(run.stops.begin(), run.stops.end(),
                                    [&](stop_time const& s) {
                                      return s.stop == leg.board_stop &&
                                             s.departure == leg.board_time;
                                    });
        auto const a = std::find_if(b, run.stops.end(), [&](stop_time const& s) {
          return s.stop == leg.alight_stop && s.arrival == leg.alight_time;
        });
        EXPECT_NE(b, run.stops.end());
        EXPECT_NE(a, run.stops.end());
        EXPECT_LT(leg.board_time, leg.alight_time);
        EXPECT_GE(leg.board_time, prev_alight);
        prev_alight = leg.alight_time;
      }
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(riders, counts) {
  EXPECT_EQ(rider_count(200, 0.5), 100U);
  EXPECT_EQ(rider_count(200, 0.7), 60U);
  EXPECT_EQ(rider_count(400, 0.9), 40U);
  EXPECT_EQ(rider_count(200, 0.0), 200U);
  EXPECT_EQ(rider_count(5, 1.0), 0U);
  EXPECT_EQ(rider_count(3, 0.5), 2U);
}

TEST(riders, assignment_sizes_and_nesting) {
  auto const feed = generate_synthetic_feed({}, 2);
  auto const ds = generate_synthetic_population(1000, 373, feed, 2);
  ASSERT_EQ(ds.transit_eligible.size(), 200U);
  transit_planner const planner{feed};

  EXPECT_TRUE(assign_rider_itineraries(ds, planner, 1.0, 9).empty());
  auto const half = assign_rider_itineraries(ds, planner, 0.5, 9);
  EXPECT_EQ(half.size(), 100U);
  EXPECT_EQ(assign_rider_itineraries(ds, planner, 0.5, 9), half);
  auto const all = assign_rider_itineraries(ds, planner, 0.0, 9);
  EXPECT_EQ(all.size(), 200U);
  std::set<person_idx_t> eligible(ds.transit_eligible.begin(),
                                  ds.transit_eligible.end());
  for (auto const& [p, itins] : all) {
    EXPECT_TRUE(eligible.contains(p));
  }
  for (auto const& [p, itins] : half) {
    ASSERT_TRUE(all.contains(p));
    EXPECT_EQ(all.at(p), itins);
  }
  auto const order = rider_order(ds, 9);
  auto const tenth = assign_rider_itineraries(ds, planner, 0.9, 9);
  EXPECT_EQ(tenth.size(), 20U);
  for (auto k = std::size_t{0}; k < 20; ++k) {
    EXPECT_TRUE(tenth.contains(order[k]));
  }
}

TEST(riders, itineraries_follow_the_schedule) {
  auto const feed = generate_synthetic_feed({}, 4);
  auto const ds = generate_synthetic_population(600, 240, feed, 4);
  transit_planner const planner{feed};
  auto const plans = assign_rider_itineraries(ds, planner, 0.0, 1);
  auto legs = 0;
  for (auto const& [p, itins] : plans) {
    for (auto const& it : itins) {
      EXPECT_EQ(it.person, p);
      ASSERT_FALSE(it.legs.empty());
      EXPECT_LE(it.legs.size(), 2U);
      EXPECT_LT(it.arrival, kMinutesPerDay);
      for (auto k = std::size_t{0}; k < it.legs.size(); ++k) {
        EXPECT_LT(it.legs[k].board_time, it.legs[k].alight_time);
        if (k > 0) {
          EXPECT_GE(it.legs[k].board_time, it.legs[k - 1].alight_time);
        }
        ++legs;
      }
    }
  }
  EXPECT_GT(legs, 100);
}
