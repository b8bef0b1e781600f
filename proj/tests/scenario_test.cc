#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"
#include "transitepi/scenario.h"
#include "transitepi/synthetic.h"

using namespace transitepi;

namespace {

scenario_world small_world(std::size_t persons, std::uint64_t seed) {
  auto feed = generate_synthetic_feed({}, seed);
  auto ds = generate_synthetic_population(persons, persons / 3 + 40, feed, seed);
  return scenario_world{std::move(ds), std::move(feed), seed};
}

contact_graph complete_home(std::size_t m) {
  std::vector<contact_event> ev;
  for (auto i = person_idx_t{0}; i < m; ++i) {
    for (auto j = i + 1; j < m; ++j) {
      ev.push_back({i, j, location_kind::home, 1440, 0});
    }
  }
  return contact_graph{m, ev};
}

std::size_t lines(std::string const& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(config, validation) {
  scenario_config c;
  EXPECT_THROW(c.validate(), config_error);  // neither r0 nor beta
  c.r0_target = 2.1;
  EXPECT_NO_THROW(c.validate());
  c.beta = 0.1;
  EXPECT_THROW(c.validate(), config_error);
  c.beta.reset();
  c.replicates = 0;
  EXPECT_THROW(c.validate(), config_error);
  c.replicates = 1;
  c.pttcr_reduction = 1.5;
  EXPECT_THROW(c.validate(), config_error);
}

TEST(closure, moves_students_home) {
  auto const feed = generate_synthetic_feed({}, 2);
  auto const ds = generate_synthetic_population(600, 240, feed, 2);
  auto const closed = apply_school_closure(ds);
  auto students = 0;
  for (auto p = std::size_t{0}; p < ds.size(); ++p) {
    auto const& before = ds.persons[p].activities;
    auto const& after = closed.persons[p].activities;
    ASSERT_EQ(before.size(), after.size());
    for (auto k = std::size_t{0}; k < before.size(); ++k) {
      EXPECT_EQ(before[k].start, after[k].start);
      EXPECT_EQ(before[k].duration, after[k].duration);
      if (before[k].kind == location_kind::school) {
        ++students;
        EXPECT_EQ(after[k].kind, location_kind::home);
        EXPECT_EQ(after[k].location, ds.persons[p].home);
      } else {
        EXPECT_EQ(before[k].kind, after[k].kind);
        EXPECT_EQ(before[k].location, after[k].location);
      }
    }
  }
  EXPECT_GT(students, 0);

  auto const twice = apply_school_closure(closed);
  for (auto p = std::size_t{0}; p < ds.size(); ++p) {
    for (auto k = std::size_t{0}; k < closed.persons[p].activities.size();
         ++k) {
      EXPECT_EQ(closed.persons[p].activities[k].location,
                twice.persons[p].activities[k].location);
    }
  }

  auto const g = build_contacts(closed, {});
  EXPECT_TRUE(std::none_of(g.events().begin(), g.events().end(),
                           [](contact_event const& e) {
                             return e.kind == location_kind::school;
                           }));
  auto const open = build_contacts(ds, {});
  EXPECT_TRUE(std::any_of(open.events().begin(), open.events().end(),
                          [](contact_event const& e) {
                            return e.kind == location_kind::school;
                          }));
}

TEST(closure, no_schools_unchanged) {
  population_dataset ds;
  ds.locations = {{"h", location_kind::home, {}}, {"w", location_kind::work, {}}};
  ds.persons = {{"a", 0, {{0, 600, 0, location_kind::home, false},
                          {600, 840, 1, location_kind::work, false}}}};
  auto const out = apply_school_closure(ds);
  EXPECT_EQ(out.persons[0].activities[1].location, 1U);
  EXPECT_EQ(out.persons[0].activities[1].kind, location_kind::work);
}

TEST(calibration, complete_graph_of_five) {
  disease_params p;
  p.infectious_days = 1;
  p.beta = 1.0;
  auto const g = complete_home(5);
  // Saturated pairs and a single infectious day: every neighbour is hit.
  EXPECT_DOUBLE_EQ(estimate_r0(transmission_table{g, p}, 300, 1), 4.0);
  p.beta = 0.0;
  EXPECT_DOUBLE_EQ(estimate_r0(transmission_table{g, p}, 300, 1), 0.0);

  auto const at_four = calibrate_beta(4.0, g, p, 1);
  EXPECT_DOUBLE_EQ(at_four.beta, 1.0);
  EXPECT_EQ(at_four.iterations, 0);

  // With tau = beta the expectation is 4 beta.
  auto const two = calibrate_beta(2.0, g, p, 1);
  EXPECT_LE(std::abs(two.achieved_r0 - 2.0), 0.1);
  EXPECT_NEAR(two.beta, 0.5, 0.05);
  EXPECT_LE(two.iterations, 40);
}

TEST(calibration, unreachable) {
  disease_params p;
  contact_graph const g{2, {{0, 1, location_kind::work, 10, 0}}};
  try {
    calibrate_beta(1.0, g, p, 1);
    FAIL();
  } catch (model_error const& e) {
    EXPECT_EQ(e.code(), model_errc::unreachable_r0);
  }
  EXPECT_THROW(calibrate_beta(-1.0, g, p, 1), config_error);
}

TEST(grid, single_cell_equals_direct_run) {
  auto world = small_world(400, 3);
  scenario_config base;
  base.beta = 0.02;
  base.days = 40;
  base.replicates = 1;
  base.seed = 9;
  disease_params const disease;
  auto const res = run_scenario_grid(world, base, disease, {});
  ASSERT_EQ(res.cells.size(), 1U);
  EXPECT_TRUE(res.calibrations.empty());

  auto p = disease;
  p.beta = 0.02;
  auto const direct = run_epidemic(world.graph(0.0, false), p, 5, 40,
                                   replicate_seed(9, 0));
  auto const& c = res.cells[0];
  ASSERT_EQ(c.curve.size(), direct.size());
  for (auto d = std::size_t{0}; d < direct.size(); ++d) {
    EXPECT_EQ(c.curve[d].s, static_cast<double>(direct[d].s));
    EXPECT_EQ(c.curve[d].i, static_cast<double>(direct[d].i));
    EXPECT_EQ(c.curve[d].r, static_cast<double>(direct[d].r));
  }
  EXPECT_DOUBLE_EQ(c.attack_rate_mean, attack_rate(direct));
}

TEST(grid, full_grid_structure_and_determinism) {
  auto world = small_world(500, 4);
  scenario_config base;
  base.r0_target = 2.1;
  base.days = 60;
  base.replicates = 2;
  base.seed = 5;
  grid_axes axes;
  axes.h_values = {6, 30, 150, kInfiniteMinutes};
  axes.r0_values = {0.9, 2.1, 4.0, 4.5};
  axes.pttcr_values = {0.0, 0.5, 0.9};
  grid_options opt;
  opt.calibration.trials = 200;
  auto const res = run_scenario_grid(world, base, disease_params{}, axes, opt);
  ASSERT_EQ(res.cells.size(), 48U);
  EXPECT_EQ(res.calibrations.size(), 4U);
  for (auto const& cal : res.calibrations) {
    EXPECT_LE(std::abs(cal.result.achieved_r0 - cal.r0_target), 0.1);
  }
  for (auto const& c : res.cells) {
    EXPECT_EQ(c.replicates.size(), 2U);
    ASSERT_EQ(c.curve.size(), 61U);
    for (auto const& m : c.curve) {
      EXPECT_NEAR(m.s + m.e + m.i + m.r, 500.0, 1e-9);
    }
    EXPECT_GE(c.attack_rate_mean, 0.0);
    EXPECT_LE(c.attack_rate_mean, 1.0);
  }
  // Riders shrink with the reduction level and nest as prefixes.
  EXPECT_EQ(res.cells.front().riders, world.riders(0.0).size());
  auto const r5 = world.riders(0.5);
  auto const r9 = world.riders(0.9);
  EXPECT_TRUE(std::equal(r9.begin(), r9.end(), r5.begin()));

  EXPECT_EQ(lines(serialize_summary(res)), 49U);
  EXPECT_EQ(lines(serialize_replicates(res)), 97U);
  EXPECT_EQ(lines(serialize_curves(res)), 1U + 48U * 61U);
  EXPECT_EQ(lines(serialize_calibration(res)), 5U);

  auto again = small_world(500, 4);
  auto const res2 = run_scenario_grid(again, base, disease_params{}, axes, opt);
  EXPECT_EQ(serialize_summary(res), serialize_summary(res2));
  EXPECT_EQ(serialize_curves(res), serialize_curves(res2));
}

TEST(grid, transit_contacts_shrink_with_reduction) {
  auto world = small_world(800, 6);
  auto last = std::size_t{0};
  auto first = true;
  for (auto const r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    auto const n = world.transit_events(r, false).size();
    if (!first) {
      EXPECT_LE(n, last);
    }
    first = false;
    last = n;
  }
  EXPECT_EQ(last, 0U);
}

TEST(grid, seeds) {
  EXPECT_NE(replicate_seed(1, 0), replicate_seed(1, 1));
  EXPECT_NE(replicate_seed(1, 0), replicate_seed(2, 0));
  EXPECT_EQ(format_minutes_or_inf(kInfiniteMinutes), "inf");
  EXPECT_EQ(format_minutes_or_inf(30), "30");
}
