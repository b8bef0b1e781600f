#include <cmath>

#include "gtest/gtest.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"
#include "transitepi/threshold.h"

using namespace transitepi;

namespace {

degree_decomposition constant(std::size_t m, std::uint32_t bus,
                              std::uint32_t nonbus) {
  return {std::vector<std::uint32_t>(m, bus),
          std::vector<std::uint32_t>(m, nonbus)};
}

degree_decomposition random_decomposition(std::uint64_t seed,
                                          std::size_t m = 500) {
  counter_stream rng{seed, 0, 0, stream_tag::fuzz};
  auto const bus_max = 1 + rng.below(12);
  auto const non_max = 3 + rng.below(20);
  degree_decomposition d;
  for (auto i = std::size_t{0}; i < m; ++i) {
    d.k_bus.push_back(static_cast<std::uint32_t>(rng.below(bus_max + 1)));
    d.k_nonbus.push_back(static_cast<std::uint32_t>(1 + rng.below(non_max)));
  }
  return d;
}

// Moments of alpha * k_bus + k_nonbus summed person by person.
std::pair<double, double> direct_moments(degree_decomposition const& d,
                                         double alpha) {
  auto s1 = 0.0;
  auto s2 = 0.0;
  for (auto i = std::size_t{0}; i < d.size(); ++i) {
    auto const k = alpha * d.k_bus[i] + d.k_nonbus[i];
    s1 += k;
    s2 += k * k;
  }
  return {s1 / d.size(), s2 / d.size()};
}

}  // namespace

TEST(alpha, range) {
  EXPECT_NO_THROW(intervention_alpha{0.0});
  EXPECT_NO_THROW(intervention_alpha{1.0});
  EXPECT_THROW(intervention_alpha{-0.1}, config_error);
  EXPECT_THROW(intervention_alpha{1.5}, config_error);
  EXPECT_THROW(intervention_alpha{std::nan("")}, config_error);
}

TEST(moments, examples) {
  auto const d = constant(10, 2, 1);
  auto const m = effective_moments(d, intervention_alpha{0.5});
  EXPECT_DOUBLE_EQ(m.mean_k_alpha, 2.0);
  EXPECT_DOUBLE_EQ(m.mean_k_alpha_sq, 4.0);

  auto const r = random_decomposition(1);
  auto const full = compute_degree_moments(r);
  auto const one = effective_moments(r, intervention_alpha{1.0});
  EXPECT_NEAR(one.mean_k_alpha, full.mean_k, 1e-12);
  EXPECT_NEAR(one.mean_k_alpha_sq, full.mean_k2, 1e-9);
  auto const zero = effective_moments(r, intervention_alpha{0.0});
  EXPECT_NEAR(zero.mean_k_alpha, full.mean_knonbus, 1e-12);
  EXPECT_NEAR(zero.mean_k_alpha_sq, full.mean_knonbus2, 1e-9);

  EXPECT_THROW(effective_moments({}, intervention_alpha{1.0}), model_error);
}

TEST(moments, match_direct_sums) {
  for (auto seed = 0U; seed < 20; ++seed) {
    auto const d = random_decomposition(seed);
    for (auto const a : {0.0, 0.3, 0.5, 1.0}) {
      auto const [m1, m2] = direct_moments(d, a);
      auto const m = effective_moments(d, intervention_alpha{a});
      EXPECT_NEAR(m.mean_k_alpha, m1, 1e-9);
      EXPECT_NEAR(m.mean_k_alpha_sq, m2, 1e-9);
    }
  }
}

TEST(w_mu, examples) {
  auto const d = constant(4, 3, 3);  // mu = 1
  auto const half = compute_w_mu(d, intervention_alpha{0.5});
  EXPECT_DOUBLE_EQ(half.mu, 1.0);
  EXPECT_DOUBLE_EQ(half.w, 0.75);
  EXPECT_DOUBLE_EQ(compute_w_mu(d, intervention_alpha{1.0}).w, 1.0);
  EXPECT_DOUBLE_EQ(compute_w_mu(constant(4, 0, 3), intervention_alpha{0.2}).w,
                   1.0);
  try {
    compute_w_mu(constant(4, 3, 0), intervention_alpha{0.5});
    FAIL();
  } catch (model_error const& e) {
    EXPECT_EQ(e.code(), model_errc::zero_non_bus_degree);
  }
}

TEST(w_mu, identity_and_bounds) {
  for (auto seed = 0U; seed < 100; ++seed) {
    auto const d = random_decomposition(seed, 200);
    for (auto const a : {0.0, 0.25, 0.5, 0.75}) {
      auto const r = compute_w_mu(d, intervention_alpha{a});
      EXPECT_NEAR(r.mu, (1 - r.w) / (r.w - a), 1e-9);
      EXPECT_GE(r.w, 1.0 / (r.mu + 1) - 1e-15);
      EXPECT_LE(r.w, 1.0);
    }
  }
}

TEST(outbreak, examples) {
  auto const reg = constant(100, 0, 3);
  auto const s = outbreak_size(reg, intervention_alpha{1.0}, 0.25);
  EXPECT_FALSE(s.divergent);
  EXPECT_NEAR(s.value, 2.5, 1e-12);
  EXPECT_DOUBLE_EQ(outbreak_size(reg, intervention_alpha{1.0}, 0.0).value, 1.0);
  EXPECT_TRUE(outbreak_size(reg, intervention_alpha{1.0}, 0.5).divergent);
  EXPECT_TRUE(outbreak_size(reg, intervention_alpha{1.0}, 0.9).divergent);
  try {
    outbreak_size(constant(3, 0, 0), intervention_alpha{1.0}, 0.1);
    FAIL();
  } catch (model_error const& e) {
    EXPECT_EQ(e.code(), model_errc::zero_mean_degree);
  }
  EXPECT_THROW(outbreak_size(reg, intervention_alpha{1.0}, 1.2), config_error);
}

TEST(outbreak, finite_values_at_least_one) {
  for (auto seed = 0U; seed < 50; ++seed) {
    auto const d = random_decomposition(seed, 100);
    for (auto const a : {0.0, 0.5, 1.0}) {
      for (auto const t : {0.0, 0.01, 0.05, 0.2, 0.6}) {
        auto const s = outbreak_size(d, intervention_alpha{a}, t);
        if (!s.divergent) {
          EXPECT_GE(s.value, 1.0);
        }
      }
    }
  }
}

TEST(threshold, regular_graphs) {
  for (auto k = 2U; k <= 9; ++k) {
    auto const t = transmissibility_threshold(constant(50, 0, k),
                                              intervention_alpha{1.0});
    if (k == 2) {
      EXPECT_DOUBLE_EQ(t.t_c, 1.0);
      EXPECT_FALSE(t.above_one);
    } else {
      EXPECT_NEAR(t.t_c, 1.0 / (k - 1), 1e-12);
    }
  }
  // Transit-only contacts removed entirely: the non-transit layer alone.
  auto const d = random_decomposition(4);
  degree_decomposition layer{std::vector<std::uint32_t>(d.size(), 0),
                             d.k_nonbus};
  EXPECT_NEAR(transmissibility_threshold(d, intervention_alpha{0.0}).t_c,
              transmissibility_threshold(layer, intervention_alpha{1.0}).t_c,
              1e-12);
}

TEST(threshold, errors_and_clamp) {
  try {
    transmissibility_threshold(constant(5, 0, 1), intervention_alpha{1.0});
    FAIL();
  } catch (model_error const& e) {
    EXPECT_EQ(e.code(), model_errc::degenerate_degrees);
  }
  try {
    transmissibility_threshold(constant(5, 4, 0), intervention_alpha{0.0});
    FAIL();
  } catch (model_error const& e) {
    EXPECT_EQ(e.code(), model_errc::zero_mean_degree);
  }
  // <k^2>/<k> = 1.8: 1/T_c = 0.8, so the formula exceeds one.
  degree_decomposition sparse{{0, 0, 0, 0, 0}, {1, 1, 1, 1, 3}};
  auto const t = transmissibility_threshold(sparse, intervention_alpha{1.0});
  EXPECT_TRUE(t.above_one);
  EXPECT_EQ(t.t_c, 1.0);
}

TEST(threshold, non_increasing_in_alpha) {
  for (auto seed = 0U; seed < 100; ++seed) {
    auto const d = random_decomposition(seed, 200);
    auto last_t = 2.0;
    auto last_k = -1.0;
    for (auto a = 0.0; a <= 1.0 + 1e-12; a += 0.1) {
      intervention_alpha const alpha{std::min(a, 1.0)};
      auto const k = effective_moments(d, alpha).mean_k_alpha;
      auto const t = transmissibility_threshold(d, alpha).t_c;
      EXPECT_GT(k, last_k);
      EXPECT_LE(t, last_t);
      last_t = t;
      last_k = k;
    }
  }
}

TEST(threshold, anticorrelated_layers_break_monotonicity) {
  // Riders with few other contacts, non-riders with many: removing transit
  // stubs raises the relative spread of k_alpha and lowers T_c.
  degree_decomposition d{{4, 0}, {2, 20}};
  auto const t0 = transmissibility_threshold(d, intervention_alpha{0.0}).t_c;
  auto const t1 = transmissibility_threshold(d, intervention_alpha{1.0}).t_c;
  EXPECT_NEAR(1.0 / t0, 202.0 / 11 - 1, 1e-12);
  EXPECT_NEAR(1.0 / t1, 218.0 / 13 - 1, 1e-12);
  EXPECT_LT(t0, t1);
}

TEST(threshold, alpha_one_reduces_to_unintervened) {
  auto const d = random_decomposition(8);
  auto const r = make_threshold_report(d, intervention_alpha{1.0}, 0.05);
  auto const m = compute_degree_moments(d);
  EXPECT_DOUBLE_EQ(r.w, 1.0);
  EXPECT_NEAR(r.v, 1.0, 1e-12);
  ASSERT_TRUE(r.t_c.has_value());
  EXPECT_NEAR(1.0 / r.t_c->t_c, m.mean_k2 / m.mean_k - 1, 1e-9);
}

TEST(report, serialization) {
  auto const d = constant(10, 0, 3);
  std::vector<threshold_report> rows{
      make_threshold_report(d, intervention_alpha{1.0}, 0.25),
      make_threshold_report(d, intervention_alpha{1.0}, 0.75)};
  auto const text = serialize_threshold_reports(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "alpha,mean_k_alpha,w,mu,v,t_c,t_c_above_one,T,outbreak_size");
  EXPECT_NE(text.find(",2.5\n"), std::string::npos);
  EXPECT_NE(text.find("divergent"), std::string::npos);
}

TEST(oracle, trivial_transmissibilities) {
  auto const d = constant(2000, 1, 2);
  percolation_options opt;
  opt.samples = 20;
  auto const zero = percolation_oracle(d, intervention_alpha{1.0}, 0.0, opt);
  EXPECT_DOUBLE_EQ(zero.mean_component_size, 1.0);
  EXPECT_DOUBLE_EQ(zero.giant_fraction, 1.0 / 2000);
  auto const one = percolation_oracle(d, intervention_alpha{1.0}, 1.0, opt);
  EXPECT_GT(one.giant_fraction, 0.9);
}

TEST(oracle, deterministic_per_seed) {
  auto const d = random_decomposition(3, 1000);
  percolation_options opt;
  opt.samples = 50;
  opt.seed = 5;
  auto const a = percolation_oracle(d, intervention_alpha{0.5}, 0.05, opt);
  auto const b = percolation_oracle(d, intervention_alpha{0.5}, 0.05, opt);
  EXPECT_EQ(a.mean_component_size, b.mean_component_size);
  EXPECT_EQ(a.giant_fraction, b.giant_fraction);
}

TEST(oracle, regular_mean_component_size) {
  percolation_options opt;
  opt.samples = 100;
  opt.roots_per_sample = 0;
  auto const r =
      percolation_oracle(constant(10000, 0, 3), intervention_alpha{1.0}, 0.25,
                         opt);
  EXPECT_NEAR(r.mean_component_size, 2.5, 3 * r.mean_component_size_se);
}

TEST(oracle, subcritical_agreement_on_random_sequence) {
  // Fractional alpha exercises stochastic rounding of the transit stubs.
  auto const d = random_decomposition(11, 10000);
  intervention_alpha const alpha{0.5};
  auto const t = 0.8 * transmissibility_threshold(d, alpha).t_c;
  percolation_options opt;
  opt.samples = 40;
  opt.roots_per_sample = 0;
  auto const r = percolation_oracle(d, alpha, t, opt);
  auto const s = outbreak_size(d, alpha, t);
  ASSERT_FALSE(s.divergent);
  EXPECT_NEAR(r.mean_component_size, s.value, 0.15 * s.value);
}

TEST(oracle, two_point_crossing) {
  degree_decomposition d;
  for (auto i = 0U; i < 10000; ++i) {
    d.k_bus.push_back(i % 2 == 0 ? 2 : 4);
    d.k_nonbus.push_back(i % 2 == 0 ? 2 : 6);
  }
  intervention_alpha const alpha{0.5};
  auto const tc = transmissibility_threshold(d, alpha).t_c;
  auto const level = std::cbrt(1.0 / 10000);
  auto const c = percolation_threshold(d, alpha, level, 100, 2);
  EXPECT_NEAR(c.t, tc, 0.05 * tc);

  // The fixed 1% level carries a finite-size shift that closes with m.
  degree_decomposition big;
  for (auto i = 0U; i < 100000; ++i) {
    big.k_bus.push_back(i % 2 == 0 ? 2 : 4);
    big.k_nonbus.push_back(i % 2 == 0 ? 2 : 6);
  }
  auto const c1 = percolation_threshold(big, alpha, 0.01, 20, 2);
  EXPECT_NEAR(c1.t, tc, 0.03 * tc);
}
