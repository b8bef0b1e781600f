#include "transitepi/scenario.h"

#include <algorithm>
#include <cmath>

#include "fmt/core.h"

#include "transitepi/copresence.h"
#include "transitepi/error.h"
#include "transitepi/rng.h"

namespace transitepi {

void scenario_config::validate() const {
  if (r0_target.has_value() == beta.has_value()) {
    throw config_error{"set exactly one of r0 and beta"};
  }
  if (r0_target && !(*r0_target > 0.0 && std::isfinite(*r0_target))) {
    throw config_error{fmt::format("r0 must be positive, got {}", *r0_target)};
  }
  if (beta && !(*beta >= 0.0 && *beta <= 1.0)) {
    throw config_error{fmt::format("beta must be in [0, 1], got {}", *beta)};
  }
  if (!(pttcr_reduction >= 0.0 && pttcr_reduction <= 1.0)) {
    throw config_error{fmt::format("pttcr_reduction must be in [0, 1], got {}",
                                   pttcr_reduction)};
  }
  if (!(h_threshold > 0.0)) {
    throw config_error{"h must be positive or inf"};
  }
  if (days < 1) {
    throw config_error{fmt::format("days must be >= 1, got {}", days)};
  }
  if (replicates < 1) {
    throw config_error{"replicates must be >= 1"};
  }
}

population_dataset apply_school_closure(population_dataset const& ds) {
  auto out = ds;
  for (auto& p : out.persons) {
    for (auto& a : p.activities) {
      if (a.kind == location_kind::school) {
        a.kind = location_kind::home;
        a.location = p.home;
      }
    }
  }
  return out;
}

calibration_result calibrate_beta(double r0_target, contact_graph const& g,
                                  disease_params const& params,
                                  std::uint64_t seed,
                                  calibration_options const& opt) {
  if (!(r0_target > 0.0)) {
    throw config_error{fmt::format("R0 target must be positive, got {}",
                                   r0_target)};
  }
  if (opt.trials == 0 || opt.max_iterations < 1) {
    throw config_error{"calibration needs trials >= 1 and iterations >= 1"};
  }
  auto const r0_at = [&](double beta) {
    auto p = params;
    p.beta = beta;
    return estimate_r0(transmission_table{g, p}, opt.trials, seed);
  };

  calibration_result res{1.0, r0_at(1.0), 0};
  if (res.achieved_r0 < r0_target - opt.tolerance) {
    throw model_error{
        model_errc::unreachable_r0,
        fmt::format("R0 {} unreachable: beta = 1 gives {:.4f}", r0_target,
                    res.achieved_r0)};
  }
  if (std::abs(res.achieved_r0 - r0_target) <= opt.tolerance) {
    return res;
  }

  auto lo = 0.0;
  auto hi = 1.0;
  while (res.iterations < opt.max_iterations) {
    auto const mid = 0.5 * (lo + hi);
    auto const r = r0_at(mid);
    ++res.iterations;
    // Keep the closest candidate seen so far.
    if (std::abs(r - r0_target) < std::abs(res.achieved_r0 - r0_target)) {
      res.beta = mid;
      res.achieved_r0 = r;
    }
    if (std::abs(r - r0_target) <= opt.tolerance) {
      break;
    }
    (r < r0_target ? lo : hi) = mid;
  }
  return res;
}

std::uint64_t replicate_seed(std::uint64_t master, std::size_t replicate) {
  return mix_seed(master, replicate);
}

scenario_world::scenario_world(population_dataset ds, transit_feed feed,
                               std::uint64_t seed, planner_options popt,
                               contact_build_options copt)
    : base_{std::move(ds)},
      planner_{std::move(feed), popt},
      contact_opt_{copt},
      order_{rider_order(base_, mix_seed(seed, 2))} {}

scenario_world::variant& scenario_world::get_variant(bool school_closure) {
  auto& v = variants_[school_closure];
  if (!v) {
    v = std::make_unique<variant>();
    v->ds = school_closure ? apply_school_closure(base_) : base_;
    v->plans = plan_riders(v->ds, v->ds.transit_eligible, planner_);
    v->place_events = place_contacts(v->ds, contact_opt_);
  }
  return *v;
}

population_dataset const& scenario_world::dataset(bool school_closure) {
  return school_closure ? get_variant(true).ds : base_;
}

std::vector<person_idx_t> scenario_world::riders(
    double pttcr_reduction) const {
  auto r = order_;
  r.resize(rider_count(r.size(), pttcr_reduction));
  return r;
}

rider_assignment scenario_world::itineraries(double pttcr_reduction,
                                             bool school_closure) {
  auto const& v = get_variant(school_closure);
  rider_assignment out;
  for (auto const p : riders(pttcr_reduction)) {
    out.emplace(p, v.plans.at(p));
  }
  return out;
}

std::vector<contact_event> scenario_world::transit_events(
    double pttcr_reduction, bool school_closure) {
  return compute_copresence(itineraries(pttcr_reduction, school_closure));
}

contact_graph const& scenario_world::graph(double pttcr_reduction,
                                           bool school_closure) {
  auto& g = graphs_[{pttcr_reduction, school_closure}];
  if (!g) {
    auto events = get_variant(school_closure).place_events;
    auto const transit = transit_events(pttcr_reduction, school_closure);
    events.insert(events.end(), transit.begin(), transit.end());
    g = std::make_unique<contact_graph>(base_.size(), std::move(events));
  }
  return *g;
}

double attack_rate(std::vector<daily_counts> const& series) {
  if (series.empty()) {
    return 0.0;
  }
  auto const& last = series.back();
  auto const m = last.s + last.e + last.i + last.r;
  return m == 0 ? 0.0
                : 1.0 - static_cast<double>(last.s) / static_cast<double>(m);
}

namespace {

template <typename T>
std::vector<T> or_single(std::vector<T> const& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

grid_result run_scenario_grid(scenario_world& world,
                              scenario_config const& base,
                              disease_params const& disease,
                              grid_axes const& axes, grid_options const& opt) {
  base.validate();
  disease.validate();
  if (opt.initial_infected > world.size()) {
    throw config_error{fmt::format("initial_infected {} exceeds population {}",
                                   opt.initial_infected, world.size())};
  }
  auto const closures = or_single(axes.closure_values, base.school_closure);
  auto const pttcrs = or_single(axes.pttcr_values, base.pttcr_reduction);
  auto const hs = or_single(axes.h_values, base.h_threshold);
  std::vector<std::optional<double>> r0s;
  if (base.beta.has_value() && axes.r0_values.empty()) {
    r0s.emplace_back(std::nullopt);
  } else {
    for (auto const r : or_single(axes.r0_values, base.r0_target.value_or(0))) {
      r0s.emplace_back(r);
    }
  }
  for (auto const p : pttcrs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw config_error{fmt::format("pttcr_reduction {} outside [0, 1]", p)};
    }
  }
  for (auto const h : hs) {
    if (!(h > 0.0)) {
      throw config_error{fmt::format("h {} must be positive or inf", h)};
    }
  }

  grid_result res;
  res.population = world.size();

  std::map<double, double> beta_of;
  for (auto const& r0 : r0s) {
    if (!r0) {
      continue;
    }
    if (beta_of.contains(*r0)) {
      continue;
    }
    auto p = disease;
    p.h_threshold = base.h_threshold;
    auto const cal = calibrate_beta(*r0, world.graph(0.0, false), p,
                                    mix_seed(base.seed, 3), opt.calibration);
    beta_of[*r0] = cal.beta;
    res.calibrations.push_back(calibration_record{*r0, cal});
  }

  std::vector<contact_graph const*> graphs;
  for (auto const closure : closures) {
    for (auto const pttcr : pttcrs) {
      auto const* g = &world.graph(pttcr, closure);
      for (auto const h : hs) {
        for (auto const& r0 : r0s) {
          cell_result c;
          c.cell = grid_cell{pttcr, h, r0, closure,
                             r0 ? beta_of.at(*r0) : *base.beta};
          c.riders = world.riders(pttcr).size();
          res.cells.push_back(std::move(c));
          graphs.push_back(g);
        }
      }
    }
  }

  auto const n_cells = static_cast<std::ptrdiff_t>(res.cells.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t k = 0; k < n_cells; ++k) {
    auto& c = res.cells[static_cast<std::size_t>(k)];
    auto const& g = *graphs[static_cast<std::size_t>(k)];
    auto p = disease;
    p.beta = c.cell.beta;
    p.h_threshold = c.cell.h_threshold;
    transmission_table const tt{g, p};
    c.transit_events = static_cast<std::size_t>(std::count_if(
        g.events().begin(), g.events().end(), [](contact_event const& e) {
          return e.kind == location_kind::transit;
        }));

    c.curve.resize(static_cast<std::size_t>(base.days) + 1);
    for (auto r = std::size_t{0}; r < base.replicates; ++r) {
      auto const seed = replicate_seed(base.seed, r);
      auto const series = run_epidemic(tt, opt.initial_infected, base.days, seed);
      replicate_result rep{r, seed, attack_rate(series), 0, 0};
      for (auto d = std::size_t{0}; d < series.size(); ++d) {
        auto const& s = series[d];
        if (s.i > rep.peak_height) {
          rep.peak_height = s.i;
          rep.peak_day = s.day;
        }
        auto& m = c.curve[d];
        m.day = s.day;
        m.s += static_cast<double>(s.s);
        m.e += static_cast<double>(s.e);
        m.i += static_cast<double>(s.i);
        m.r += static_cast<double>(s.r);
        m.new_infections += static_cast<double>(s.new_infections);
      }
      c.replicates.push_back(rep);
    }

    auto const n = static_cast<double>(base.replicates);
    for (auto& m : c.curve) {
      m.s /= n;
      m.e /= n;
      m.i /= n;
      m.r /= n;
      m.new_infections /= n;
      if (m.i > c.peak_height) {
        c.peak_height = m.i;
        c.peak_day = m.day;
      }
    }
    auto sum = 0.0;
    for (auto const& rep : c.replicates) {
      sum += rep.attack_rate;
    }
    c.attack_rate_mean = sum / n;
    auto var = 0.0;
    for (auto const& rep : c.replicates) {
      var += (rep.attack_rate - c.attack_rate_mean) *
             (rep.attack_rate - c.attack_rate_mean);
    }
    c.attack_rate_sd = base.replicates > 1 ? std::sqrt(var / (n - 1)) : 0.0;
  }
  return res;
}

std::string format_minutes_or_inf(double v) {
  return std::isinf(v) ? std::string{"inf"} : fmt::format("{:.10g}", v);
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string cell_key(grid_cell const& c) {
  return fmt::format("{},{},{},{}", num(c.pttcr_reduction),
                     format_minutes_or_inf(c.h_threshold),
                     c.r0_target ? num(*c.r0_target) : std::string{},
                     c.school_closure ? 1 : 0);
}

constexpr auto kCellHeader = "pttcr_reduction,h_minutes,r0,school_closure";

}  // namespace

std::string serialize_calibration(grid_result const& g) {
  std::string out = "r0_target,beta,achieved_r0,iterations\n";
  for (auto const& c : g.calibrations) {
    out += fmt::format("{},{},{},{}\n", num(c.r0_target), num(c.result.beta),
                       num(c.result.achieved_r0), c.result.iterations);
  }
  return out;
}

std::string serialize_summary(grid_result const& g) {
  auto out = fmt::format(
      "{},beta,riders,transit_contacts,replicates,attack_rate_mean,"
      "attack_rate_sd,peak_day,peak_infectious\n",
      kCellHeader);
  for (auto const& c : g.cells) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", cell_key(c.cell),
                       num(c.cell.beta), c.riders, c.transit_events,
                       c.replicates.size(), num(c.attack_rate_mean),
                       num(c.attack_rate_sd), c.peak_day, num(c.peak_height));
  }
  return out;
}

std::string serialize_replicates(grid_result const& g) {
  auto out = fmt::format("{},replicate,seed,attack_rate,peak_day,"
                         "peak_infectious\n",
                         kCellHeader);
  for (auto const& c : g.cells) {
    for (auto const& r : c.replicates) {
      out += fmt::format("{},{},{},{},{},{}\n", cell_key(c.cell), r.replicate,
                         r.seed, num(r.attack_rate), r.peak_day,
                         r.peak_height);
    }
  }
  return out;
}

std::string serialize_curves(grid_result const& g) {
  auto out = fmt::format("{},day,S,E,I,R,new_infections\n", kCellHeader);
  for (auto const& c : g.cells) {
    auto const key = cell_key(c.cell);
    for (auto const& m : c.curve) {
      out += fmt::format("{},{},{},{},{},{},{}\n", key, m.day, num(m.s),
                         num(m.e), num(m.i), num(m.r), num(m.new_infections));
    }
  }
  return out;
}

}  // namespace transitepi
