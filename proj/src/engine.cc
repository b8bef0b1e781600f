#include "transitepi/engine.h"

#include <algorithm>
#include <cmath>

#include "fmt/core.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"

namespace transitepi {

void disease_params::validate() const {
  if (!(beta >= 0.0) || !(c_place >= 0.0) || !(transit_multiplier >= 0.0)) {
    throw config_error{"beta, c_place and transit_multiplier must be >= 0"};
  }
  if (!(h_threshold > 0.0)) {
    throw config_error{"h must be positive or inf"};
  }
  if (!(saturation_minutes_place > 0.0) ||
      std::isinf(saturation_minutes_place)) {
    throw config_error{"saturation_minutes_place must be positive and finite"};
  }
  if (latent_days < 0 || infectious_days < 1) {
    throw config_error{"need latent_days >= 0 and infectious_days >= 1"};
  }
}

double contact_rate(location_kind kind, disease_params const& p) {
  return kind == location_kind::transit ? p.transit_multiplier * p.c_place
                                        : p.c_place;
}

double pair_infection_prob(minutes_t overlap, location_kind kind,
                           disease_params const& p) {
  auto const horizon = kind == location_kind::transit
                           ? p.h_threshold
                           : p.saturation_minutes_place;
  if (std::isinf(horizon) || overlap <= 0) {
    return 0.0;
  }
  auto const exposure = std::min(static_cast<double>(overlap) / horizon, 1.0);
  return std::clamp(p.beta * contact_rate(kind, p) * exposure, 0.0, 1.0);
}

double infection_force(std::span<double const> taus) {
  auto escape = 1.0;
  for (auto const t : taus) {
    escape *= 1.0 - t;
  }
  return 1.0 - escape;
}

epidemic_state::epidemic_state(std::size_t m, std::uint64_t s)
    : seed{s},
      status(m, health::S),
      entered_on(m, 0),
      infected_by(m, kInvalidIdx) {}

daily_counts count_states(epidemic_state const& st, int day) {
  daily_counts c;
  c.day = day;
  for (auto const h : st.status) {
    switch (h) {
      case health::S: ++c.s; break;
      case health::E: ++c.e; break;
      case health::I: ++c.i; break;
      case health::R: ++c.r; break;
    }
  }
  return c;
}

transmission_table::transmission_table(contact_graph const& g,
                                       disease_params const& p)
    : params_{p} {
  p.validate();
  offsets_.assign(g.size() + 1, 0);
  for (auto i = person_idx_t{0}; i < g.size(); ++i) {
    auto const adj = g.neighbors(i);
    for (auto a = std::size_t{0}; a < adj.size();) {
      auto escape = 1.0;
      auto b = a;
      for (; b < adj.size() && adj[b].neighbor == adj[a].neighbor; ++b) {
        escape *= 1.0 - pair_infection_prob(adj[b].minutes, adj[b].kind, p);
      }
      if (escape < 1.0) {
        entries_.push_back(entry{adj[a].neighbor, 1.0 - escape});
      }
      a = b;
    }
    offsets_[i + 1] = entries_.size();
  }
}

namespace {

struct infection {
  person_idx_t person;
  person_idx_t by;
};

// Decides whether susceptible i is infected on `day`, reading the state of
// that day only.
bool try_infect(epidemic_state const& st, transmission_table const& tt,
                person_idx_t i, int day, person_idx_t& by) {
  auto escape = 1.0;
  auto saturated = std::size_t{0};
  for (auto const& e : tt.neighbors(i)) {
    if (st.status[e.neighbor] == health::I) {
      escape *= 1.0 - e.tau;
      saturated += e.tau >= 1.0 ? 1U : 0U;
    }
  }
  auto const lambda = 1.0 - escape;
  if (lambda <= 0.0) {
    return false;
  }
  counter_stream rng{st.seed, i, static_cast<std::uint32_t>(day),
                     stream_tag::infection};
  if (!(rng.uniform() < lambda)) {
    return false;
  }

  // Attribute the infection to one infectious neighbor with weight
  // -log(1 - tau), i.e. the hazard each contact contributes.
  counter_stream pick{st.seed, i, static_cast<std::uint32_t>(day),
                      stream_tag::attribution};
  if (saturated != 0) {
    auto k = pick.below(saturated);
    for (auto const& e : tt.neighbors(i)) {
      if (st.status[e.neighbor] == health::I && e.tau >= 1.0 && k-- == 0) {
        by = e.neighbor;
        return true;
      }
    }
  }
  auto const total = -std::log(escape);
  auto x = pick.uniform() * total;
  by = kInvalidIdx;
  for (auto const& e : tt.neighbors(i)) {
    if (st.status[e.neighbor] == health::I && e.tau > 0.0) {
      by = e.neighbor;
      x += std::log1p(-e.tau);
      if (x < 0.0) {
        break;
      }
    }
  }
  return true;
}

daily_counts advance(epidemic_state& st, transmission_table const& tt, int day,
                     std::vector<infection> const& infections) {
  auto const& p = tt.params();
  auto const next = day + 1;
  for (auto i = std::size_t{0}; i < st.size(); ++i) {
    if (st.status[i] == health::I &&
        next - st.entered_on[i] >= p.infectious_days) {
      st.status[i] = health::R;
      st.entered_on[i] = next;
    }
  }
  for (auto const& inf : infections) {
    st.status[inf.person] = health::E;
    st.entered_on[inf.person] = next;
    st.infected_by[inf.person] = inf.by;
  }
  for (auto i = std::size_t{0}; i < st.size(); ++i) {
    if (st.status[i] == health::E &&
        next - st.entered_on[i] >= p.latent_days) {
      st.status[i] = health::I;
      st.entered_on[i] = next;
    }
  }
  auto c = count_states(st, next);
  c.new_infections = infections.size();
  return c;
}

}  // namespace

daily_counts step_day(epidemic_state& st, transmission_table const& tt,
                      int day) {
  std::vector<std::uint8_t> exposed(st.size(), 0U);
  for (auto j = person_idx_t{0}; j < st.size(); ++j) {
    if (st.status[j] != health::I) {
      continue;
    }
    for (auto const& e : tt.neighbors(j)) {
      exposed[e.neighbor] = 1U;
    }
  }
  std::vector<infection> infections;
  for (auto i = person_idx_t{0}; i < st.size(); ++i) {
    auto by = kInvalidIdx;
    if (exposed[i] != 0U && st.status[i] == health::S &&
        try_infect(st, tt, i, day, by)) {
      infections.push_back(infection{i, by});
    }
  }
  return advance(st, tt, day, infections);
}

daily_counts step_day(epidemic_state& st, transmission_table const& tt,
                      int day, std::span<person_idx_t const> order) {
  std::vector<infection> infections;
  for (auto const i : order) {
    auto by = kInvalidIdx;
    if (st.status[i] == health::S && try_infect(st, tt, i, day, by)) {
      infections.push_back(infection{i, by});
    }
  }
  return advance(st, tt, day, infections);
}

epidemic_state seed_epidemic(std::size_t m, std::size_t initial_infected,
                             std::uint64_t seed) {
  if (initial_infected > m) {
    throw config_error{fmt::format(
        "initial_infected {} exceeds population {}", initial_infected, m)};
  }
  epidemic_state st{m, seed};
  std::vector<person_idx_t> ids(m);
  for (auto i = person_idx_t{0}; i < m; ++i) {
    ids[i] = i;
  }
  // Partial Fisher-Yates: the first initial_infected slots are the seeds.
  counter_stream rng{seed, 0, 0, stream_tag::seeding};
  for (auto k = std::size_t{0}; k < initial_infected; ++k) {
    auto const j = k + static_cast<std::size_t>(rng.below(m - k));
    std::swap(ids[k], ids[j]);
    st.status[ids[k]] = health::I;
  }
  return st;
}

std::vector<daily_counts> run_epidemic(transmission_table const& tt,
                                       std::size_t initial_infected, int days,
                                       std::uint64_t seed) {
  if (days <= 0) {
    throw model_error{model_errc::invalid_horizon,
                      fmt::format("horizon must be >= 1 day, got {}", days)};
  }
  auto st = seed_epidemic(tt.size(), initial_infected, seed);
  std::vector<daily_counts> series;
  series.reserve(static_cast<std::size_t>(days) + 1);
  series.push_back(count_states(st, 0));
  for (auto d = 0; d < days; ++d) {
    auto const& last = series.back();
    if (last.e + last.i == 0) {
      auto c = last;
      c.day = d + 1;
      c.new_infections = 0;
      series.push_back(c);
      continue;
    }
    series.push_back(step_day(st, tt, d));
  }
  return series;
}

std::vector<daily_counts> run_epidemic(contact_graph const& g,
                                       disease_params const& p,
                                       std::size_t initial_infected, int days,
                                       std::uint64_t seed) {
  return run_epidemic(transmission_table{g, p}, initial_infected, days, seed);
}

double estimate_r0(transmission_table const& tt, std::size_t trials,
                   std::uint64_t seed) {
  auto const m = tt.size();
  if (m == 0) {
    throw model_error{model_errc::empty_population,
                      "cannot estimate R0 of an empty population"};
  }
  if (trials == 0) {
    throw config_error{"R0 estimation needs at least one trial"};
  }
  auto const infectious_days = tt.params().infectious_days;
  auto total = std::size_t{0};
  for (auto t = std::size_t{0}; t < trials; ++t) {
    counter_stream pick{seed, static_cast<std::uint32_t>(t), 0,
                        stream_tag::calibration_index};
    auto const index = static_cast<person_idx_t>(pick.below(m));
    for (auto const& e : tt.neighbors(index)) {
      // A neighbor is infected on the first day its draw falls below tau.
      for (auto d = 0; d < infectious_days; ++d) {
        counter_stream rng{seed, e.neighbor, static_cast<std::uint32_t>(d),
                           stream_tag::calibration_infection,
                           static_cast<std::uint32_t>(t)};
        if (rng.uniform() < e.tau) {
          ++total;
          break;
        }
      }
    }
  }
  return static_cast<double>(total) / static_cast<double>(trials);
}

double mean_edge_transmissibility(transmission_table const& tt) {
  auto sum = 0.0;
  auto n = std::size_t{0};
  for (auto i = person_idx_t{0}; i < tt.size(); ++i) {
    for (auto const& e : tt.neighbors(i)) {
      sum += 1.0 - std::pow(1.0 - e.tau, tt.params().infectious_days);
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::string serialize_daily_counts(std::span<daily_counts const> series) {
  std::string out = "day,S,E,I,R,new_infections\n";
  for (auto const& c : series) {
    out += fmt::format("{},{},{},{},{},{}\n", c.day, c.s, c.e, c.i, c.r,
                       c.new_infections);
  }
  return out;
}

}  // namespace transitepi
