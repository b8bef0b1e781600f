#include "transitepi/config.h"

#include <charconv>
#include <fstream>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "boost/algorithm/string.hpp"
#include "boost/property_tree/ini_parser.hpp"
#include "boost/property_tree/ptree.hpp"
#include "fmt/core.h"

#include "transitepi/error.h"
#include "transitepi/rng.h"
#include "transitepi/synthetic.h"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace transitepi {

namespace {

constexpr auto kExtraPlaces = std::size_t{40};

double to_double(std::string const& key, std::string s) {
  boost::algorithm::trim(s);
  if (boost::algorithm::iequals(s, "inf")) {
    return kInfiniteMinutes;
  }
  double v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw config_error{fmt::format("{}: '{}' is not a number", key, s)};
  }
  return v;
}

template <typename Int>
Int to_int(std::string const& key, std::string s) {
  boost::algorithm::trim(s);
  Int v{};
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw config_error{fmt::format("{}: '{}' is not an integer", key, s)};
  }
  return v;
}

bool to_bool(std::string const& key, std::string s) {
  boost::algorithm::trim(s);
  boost::algorithm::to_lower(s);
  if (s == "true" || s == "1" || s == "yes") {
    return true;
  }
  if (s == "false" || s == "0" || s == "no") {
    return false;
  }
  throw config_error{fmt::format("{}: '{}' is not a boolean", key, s)};
}

std::vector<std::string> split_list(std::string const& s) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, s, boost::algorithm::is_any_of(","));
  for (auto& p : parts) {
    boost::algorithm::trim(p);
  }
  if (parts.size() == 1 && parts.front().empty()) {
    parts.clear();
  }
  return parts;
}

std::string num(double v) {
  return std::isinf(v) ? std::string{"inf"} : fmt::format("{:.17g}", v);
}

std::string resolve(std::string const& p, std::string const& base_dir) {
  auto path = fs::path{p};
  if (path.is_relative() && !base_dir.empty()) {
    path = fs::path{base_dir} / path;
  }
  return path.lexically_normal().string();
}

}  // namespace

double parse_minutes_or_inf(std::string const& s) {
  auto const v = to_double("h_minutes", s);
  if (!(v > 0.0)) {
    throw config_error{fmt::format("h_minutes must be positive, got '{}'", s)};
  }
  return v;
}

std::size_t default_synthetic_locations(std::size_t persons) {
  return (persons + 2) / 3 + kExtraPlaces;
}

void simulation_config::validate() const {
  disease.validate();
  scenario.validate();
  if (population.activities.has_value() != population.gtfs.has_value()) {
    throw config_error{"population needs both activities and gtfs, or neither"};
  }
  if (!(population.transit_fraction >= 0.0 &&
        population.transit_fraction <= 1.0)) {
    throw config_error{"transit_fraction must be in [0, 1]"};
  }
  if (calibration_trials < 1) {
    throw config_error{"calibration_trials must be >= 1"};
  }
  if (population.max_group_size && *population.max_group_size < 2) {
    throw config_error{"max_group_size must be >= 2"};
  }
  for (auto const h : grid.h_values) {
    if (!(h > 0.0)) {
      throw config_error{"grid h_minutes must be positive or inf"};
    }
  }
  for (auto const r : grid.r0_values) {
    if (!(r > 0.0 && std::isfinite(r))) {
      throw config_error{"grid r0 values must be positive"};
    }
  }
  for (auto const p : grid.pttcr_values) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw config_error{"grid pttcr_reduction values must be in [0, 1]"};
    }
  }
}

simulation_config parse_simulation_config(std::string const& text,
                                          std::string const& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{text};
    pt::ini_parser::read_ini(in, tree);
  } catch (pt::ini_parser_error const& e) {
    throw config_error{fmt::format("config line {}: {}", e.line(),
                                   e.message())};
  }

  simulation_config cfg;
  auto& pop = cfg.population;
  auto& dis = cfg.disease;
  auto& sc = cfg.scenario;
  auto& grid = cfg.grid;

  for (auto const& [section, keys] : tree) {
    if (keys.empty() && !keys.data().empty()) {
      throw config_error{
          fmt::format("key '{}' outside of a section", section)};
    }
    for (auto const& [key, node] : keys) {
      auto const name = section + "." + key;
      auto const v = node.data();
      if (section == "population") {
        if (key == "activities") {
          pop.activities = resolve(v, base_dir);
        } else if (key == "gtfs") {
          pop.gtfs = resolve(v, base_dir);
        } else if (key == "synthetic_persons") {
          pop.synthetic_persons = to_int<std::size_t>(name, v);
        } else if (key == "synthetic_locations") {
          pop.synthetic_locations = to_int<std::size_t>(name, v);
        } else if (key == "seed") {
          pop.seed = to_int<std::uint64_t>(name, v);
        } else if (key == "transit_fraction") {
          pop.transit_fraction = to_double(name, v);
        } else if (key == "initial_infected") {
          pop.initial_infected = to_int<std::size_t>(name, v);
        } else if (key == "max_group_size") {
          pop.max_group_size = to_int<std::size_t>(name, v);
        } else {
          throw config_error{fmt::format("unknown key '{}'", name)};
        }
      } else if (section == "disease") {
        if (key == "c_place") {
          dis.c_place = to_double(name, v);
        } else if (key == "transit_multiplier") {
          dis.transit_multiplier = to_double(name, v);
        } else if (key == "latent_days") {
          dis.latent_days = to_int<int>(name, v);
        } else if (key == "infectious_days") {
          dis.infectious_days = to_int<int>(name, v);
        } else if (key == "saturation_minutes_place") {
          dis.saturation_minutes_place = to_double(name, v);
        } else {
          throw config_error{fmt::format("unknown key '{}'", name)};
        }
      } else if (section == "scenario") {
        if (key == "pttcr_reduction") {
          sc.pttcr_reduction = to_double(name, v);
        } else if (key == "h_minutes") {
          sc.h_threshold = parse_minutes_or_inf(v);
        } else if (key == "r0") {
          sc.r0_target = to_double(name, v);
        } else if (key == "beta") {
          sc.beta = to_double(name, v);
        } else if (key == "school_closure") {
          sc.school_closure = to_bool(name, v);
        } else if (key == "days") {
          sc.days = to_int<int>(name, v);
        } else if (key == "replicates") {
          sc.replicates = to_int<std::size_t>(name, v);
        } else if (key == "seed") {
          sc.seed = to_int<std::uint64_t>(name, v);
        } else if (key == "calibration_trials") {
          cfg.calibration_trials = to_int<std::size_t>(name, v);
        } else {
          throw config_error{fmt::format("unknown key '{}'", name)};
        }
      } else if (section == "grid") {
        if (key == "h_minutes") {
          for (auto const& x : split_list(v)) {
            grid.h_values.push_back(parse_minutes_or_inf(x));
          }
        } else if (key == "r0") {
          for (auto const& x : split_list(v)) {
            grid.r0_values.push_back(to_double(name, x));
          }
        } else if (key == "pttcr_reduction") {
          for (auto const& x : split_list(v)) {
            grid.pttcr_values.push_back(to_double(name, x));
          }
        } else if (key == "school_closure") {
          for (auto const& x : split_list(v)) {
            grid.closure_values.push_back(to_bool(name, x));
          }
        } else {
          throw config_error{fmt::format("unknown key '{}'", name)};
        }
      } else {
        throw config_error{fmt::format("unknown section [{}]", section)};
      }
    }
  }

  // A grid of R0 targets needs no single target; use its first value so the
  // base scenario stays complete.
  if (!sc.r0_target && !sc.beta && !grid.r0_values.empty()) {
    sc.r0_target = grid.r0_values.front();
  }
  cfg.validate();
  return cfg;
}

simulation_config load_simulation_config(std::string const& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw config_error{fmt::format("cannot read config '{}'", path)};
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_simulation_config(
      ss.str(), fs::absolute(fs::path{path}).parent_path().string());
}

std::string serialize_simulation_config(simulation_config const& cfg) {
  auto const& pop = cfg.population;
  auto const& dis = cfg.disease;
  auto const& sc = cfg.scenario;
  auto const& grid = cfg.grid;

  auto const join = [](auto const& values, auto&& fmt_one) {
    std::string s;
    for (auto const& v : values) {
      s += s.empty() ? "" : ",";
      s += fmt_one(v);
    }
    return s;
  };

  std::string out = "[population]\n";
  if (pop.activities) {
    out += fmt::format("activities = {}\n", *pop.activities);
    out += fmt::format("gtfs = {}\n", *pop.gtfs);
  }
  out += fmt::format("synthetic_persons = {}\n", pop.synthetic_persons);
  if (pop.synthetic_locations) {
    out += fmt::format("synthetic_locations = {}\n", *pop.synthetic_locations);
  }
  if (pop.seed) {
    out += fmt::format("seed = {}\n", *pop.seed);
  }
  out += fmt::format("transit_fraction = {}\n", num(pop.transit_fraction));
  out += fmt::format("initial_infected = {}\n", pop.initial_infected);
  if (pop.max_group_size) {
    out += fmt::format("max_group_size = {}\n", *pop.max_group_size);
  }

  out += "\n[disease]\n";
  out += fmt::format("c_place = {}\n", num(dis.c_place));
  out += fmt::format("transit_multiplier = {}\n", num(dis.transit_multiplier));
  out += fmt::format("latent_days = {}\n", dis.latent_days);
  out += fmt::format("infectious_days = {}\n", dis.infectious_days);
  out += fmt::format("saturation_minutes_place = {}\n",
                     num(dis.saturation_minutes_place));

  out += "\n[scenario]\n";
  out += fmt::format("pttcr_reduction = {}\n", num(sc.pttcr_reduction));
  out += fmt::format("h_minutes = {}\n", num(sc.h_threshold));
  if (sc.r0_target) {
    out += fmt::format("r0 = {}\n", num(*sc.r0_target));
  }
  if (sc.beta) {
    out += fmt::format("beta = {}\n", num(*sc.beta));
  }
  out += fmt::format("school_closure = {}\n", sc.school_closure);
  out += fmt::format("days = {}\n", sc.days);
  out += fmt::format("replicates = {}\n", sc.replicates);
  out += fmt::format("seed = {}\n", sc.seed);
  out += fmt::format("calibration_trials = {}\n", cfg.calibration_trials);

  out += "\n[grid]\n";
  out += fmt::format("h_minutes = {}\n", join(grid.h_values, num));
  out += fmt::format("r0 = {}\n", join(grid.r0_values, num));
  out += fmt::format("pttcr_reduction = {}\n", join(grid.pttcr_values, num));
  out += fmt::format(
      "school_closure = {}\n",
      join(grid.closure_values, [](bool b) { return std::string{b ? "true" : "false"}; }));
  return out;
}

std::vector<std::string> input_files(population_config const& pop) {
  if (!pop.activities) {
    return {};
  }
  auto const dir = fs::path{*pop.gtfs};
  return {*pop.activities, (dir / "stops.txt").string(),
          (dir / "routes.txt").string(), (dir / "trips.txt").string(),
          (dir / "stop_times.txt").string()};
}

scenario_world load_world(simulation_config const& cfg) {
  auto const& pop = cfg.population;
  auto const seed = pop.seed.value_or(cfg.scenario.seed);
  contact_build_options copt;
  copt.max_group_size = pop.max_group_size;

  if (pop.activities) {
    activity_ingest_options opt;
    opt.transit_fraction = pop.transit_fraction;
    opt.eligibility_seed = mix_seed(seed, 1);
    auto ds = parse_activity_file(*pop.activities, opt);
    auto feed = parse_gtfs_feed(*pop.gtfs);
    return scenario_world{std::move(ds), std::move(feed), seed, {}, copt};
  }

  auto feed = generate_synthetic_feed({}, seed);
  synthetic_population_options popt;
  popt.transit_fraction = pop.transit_fraction;
  auto ds = generate_synthetic_population(
      pop.synthetic_persons,
      pop.synthetic_locations.value_or(
          default_synthetic_locations(pop.synthetic_persons)),
      feed, seed, popt);
  return scenario_world{std::move(ds), std::move(feed), seed, {}, copt};
}

}  // namespace transitepi
