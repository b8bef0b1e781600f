#include "transitepi/cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "omp.h"

#include "CLI11.hpp"
#include "fmt/core.h"
#include "json.hpp"

#include "transitepi/config.h"
#include "transitepi/contact_graph.h"
#include "transitepi/csv.h"
#include "transitepi/error.h"
#include "transitepi/manifest.h"
#include "transitepi/synthetic.h"
#include "transitepi/threshold.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace transitepi {

namespace {

using file_list = std::vector<std::pair<std::string, std::string>>;

struct command_run {
  run_manifest manifest;
  file_list files;
};

std::string absolute_path(std::string const& p) {
  return fs::absolute(fs::path{p}).lexically_normal().string();
}

std::vector<file_digest> digest_inputs(std::vector<std::string> const& paths) {
  std::vector<file_digest> v;
  for (auto const& p : paths) {
    v.push_back({p, sha256_file(p)});
  }
  return v;
}

// Writes every file below `out_dir`, then the manifest with their digests.
void write_outputs(std::string const& out_dir, command_run& run) {
  fs::create_directories(out_dir);
  run.manifest.outputs.clear();
  for (auto const& [name, content] : run.files) {
    auto const path = fs::path{out_dir} / name;
    fs::create_directories(path.parent_path());
    std::ofstream f{path, std::ios::binary};
    f << content;
    if (!f) {
      throw std::runtime_error{
          fmt::format("cannot write '{}'", path.string())};
    }
    run.manifest.outputs.push_back({name, sha256_hex(content)});
  }
  std::ofstream f{fs::path{out_dir} / "manifest.json", std::ios::binary};
  f << serialize_manifest(run.manifest);
  if (!f) {
    throw std::runtime_error{"cannot write manifest.json"};
  }
}

// simulate ------------------------------------------------------------------

command_run simulate(json const& args) {
  auto const cfg = parse_simulation_config(args.at("config").get<std::string>());
  auto const export_edges = args.value("export_edges", false);
  auto const export_transit = args.value("export_transit", false);

  auto world = load_world(cfg);
  grid_options gopt;
  gopt.initial_infected = cfg.population.initial_infected;
  gopt.calibration.trials = cfg.calibration_trials;
  auto const res =
      run_scenario_grid(world, cfg.scenario, cfg.disease, cfg.grid, gopt);

  command_run run;
  run.manifest.version = tool_version();
  run.manifest.command = "simulate";
  run.manifest.seed = cfg.scenario.seed;
  run.manifest.arguments = args;
  run.manifest.inputs = digest_inputs(input_files(cfg.population));

  if (!res.calibrations.empty()) {
    run.files.emplace_back("calibration.csv", serialize_calibration(res));
  }
  run.files.emplace_back("summary.csv", serialize_summary(res));
  run.files.emplace_back("replicates.csv", serialize_replicates(res));
  run.files.emplace_back("curves.csv", serialize_curves(res));
  auto const pttcr = cfg.scenario.pttcr_reduction;
  auto const closure = cfg.scenario.school_closure;
  if (export_edges) {
    run.files.emplace_back(
        "edges.csv", serialize_edge_list(world.graph(pttcr, closure).events()));
  }
  if (export_transit) {
    run.files.emplace_back(
        "transit.csv",
        serialize_copresence(world.transit_events(pttcr, closure)));
  }
  return run;
}

// threshold -----------------------------------------------------------------

command_run threshold(json const& args) {
  command_run run;
  run.manifest.version = tool_version();
  run.manifest.command = "threshold";
  run.manifest.seed = args.at("seed").get<std::uint64_t>();
  run.manifest.arguments = args;

  degree_decomposition decomp;
  if (args.contains("edges")) {
    auto const path = args.at("edges").get<std::string>();
    std::optional<std::size_t> persons;
    if (args.contains("persons")) {
      persons = args.at("persons").get<std::size_t>();
    }
    decomp = degree_decompose(
        parse_edge_list(read_text_file(path), path, persons));
    run.manifest.inputs = digest_inputs({path});
  } else {
    auto const cfg =
        parse_simulation_config(args.at("config").get<std::string>());
    auto world = load_world(cfg);
    decomp = degree_decompose(world.graph(cfg.scenario.pttcr_reduction,
                                          cfg.scenario.school_closure));
    run.manifest.inputs = digest_inputs(input_files(cfg.population));
  }

  auto const alphas = args.at("alpha").get<std::vector<double>>();
  auto const ts = args.at("t").get<std::vector<double>>();
  auto const samples = args.at("oracle_samples").get<std::size_t>();

  std::vector<threshold_report> reports;
  std::vector<std::optional<percolation_result>> oracle;
  for (auto const a : alphas) {
    intervention_alpha const alpha{a};
    for (auto const t : ts) {
      reports.push_back(make_threshold_report(decomp, alpha, t));
      if (samples > 0) {
        percolation_options popt;
        popt.samples = samples;
        popt.seed = run.manifest.seed;
        oracle.emplace_back(percolation_oracle(decomp, alpha, t, popt));
      }
    }
  }
  run.files.emplace_back("threshold.csv",
                         serialize_threshold_reports(reports, oracle));
  return run;
}

// generate ------------------------------------------------------------------

command_run generate(json const& args) {
  auto const persons = args.at("persons").get<std::size_t>();
  auto const locations = args.at("locations").get<std::size_t>();
  auto const seed = args.at("seed").get<std::uint64_t>();
  auto const fraction = args.at("transit_fraction").get<double>();

  auto const feed = generate_synthetic_feed({}, seed);
  synthetic_population_options popt;
  popt.transit_fraction = fraction;
  auto const ds =
      generate_synthetic_population(persons, locations, feed, seed, popt);
  auto const gtfs = serialize_gtfs(feed);

  command_run run;
  run.manifest.version = tool_version();
  run.manifest.command = "generate";
  run.manifest.seed = seed;
  run.manifest.arguments = args;
  run.files = {{"activities.csv", serialize_activities(ds)},
               {"gtfs/stops.txt", gtfs.stops},
               {"gtfs/routes.txt", gtfs.routes},
               {"gtfs/trips.txt", gtfs.trips},
               {"gtfs/stop_times.txt", gtfs.stop_times}};
  return run;
}

command_run dispatch(std::string const& command, json const& args) {
  if (command == "simulate") {
    return simulate(args);
  }
  if (command == "threshold") {
    return threshold(args);
  }
  if (command == "generate") {
    return generate(args);
  }
  throw config_error{fmt::format("unknown command '{}'", command)};
}

void replay(std::string const& manifest_path, std::string const& out_dir,
            std::ostream& out) {
  auto const m = parse_manifest(read_text_file(manifest_path));
  for (auto const& in : m.inputs) {
    if (sha256_file(in.path) != in.sha256) {
      throw std::runtime_error{
          fmt::format("input '{}' changed since the manifest was written",
                      in.path)};
    }
  }
  auto run = dispatch(m.command, m.arguments);
  write_outputs(out_dir, run);
  if (run.manifest.outputs != m.outputs) {
    throw std::runtime_error{"replayed outputs differ from the manifest"};
  }
  out << fmt::format("replayed {} ({} files identical)\n", m.command,
                     m.outputs.size());
}

json error_json(std::string_view kind, std::string_view message) {
  return json{{"error", kind}, {"message", message}};
}

}  // namespace

int run_cli(std::vector<std::string> const& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Transit-aware epidemic simulation on synthetic or real towns",
               "transitepi"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")
      ->check(CLI::NonNegativeNumber);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a scenario grid");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> pttcr;
  std::optional<std::string> h_minutes;
  std::optional<double> r0;
  std::optional<double> beta;
  bool close_schools = false;
  std::optional<int> days;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> scale;
  std::optional<std::size_t> locations;
  bool export_edges = false;
  bool export_transit = false;
  sim->add_option("--config", config_path, "INI scenario file");
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--seed", seed, "Master seed");
  sim->add_option("--pttcr-reduction", pttcr, "Rider reduction in [0, 1]");
  sim->add_option("--h-minutes", h_minutes, "Transit threshold h (or inf)");
  auto* r0_opt = sim->add_option("--r0", r0, "Target R0 (beta calibrated)");
  auto* beta_opt = sim->add_option("--beta", beta, "Fixed infection rate");
  r0_opt->excludes(beta_opt);
  sim->add_flag("--close-schools", close_schools, "Close schools from day 0");
  sim->add_option("--days", days, "Simulated days");
  sim->add_option("--replicates", replicates, "Replicates per cell");
  sim->add_option("--synthetic-scale", scale,
                  "Generate a synthetic town with this many persons");
  sim->add_option("--locations", locations,
                  "Locations of the synthetic town (homes included)");
  sim->add_flag("--export-edges", export_edges, "Write edges.csv");
  sim->add_flag("--export-transit", export_transit, "Write transit.csv");

  // threshold
  auto* thr = app.add_subcommand("threshold", "Transmissibility threshold");
  std::string edges_path;
  std::string thr_config;
  std::optional<std::size_t> persons;
  std::vector<double> alphas{1.0};
  std::vector<double> ts{0.1};
  std::size_t oracle_samples = 0;
  std::uint64_t thr_seed = 1;
  std::string thr_out;
  auto* edges_opt = thr->add_option("--edges", edges_path, "Edge list file");
  auto* thr_cfg_opt =
      thr->add_option("--config", thr_config, "Build the graph from a config");
  edges_opt->excludes(thr_cfg_opt);
  thr->add_option("--persons", persons, "Population size of the edge list")
      ->needs(edges_opt);
  thr->add_option("--alpha", alphas, "Remaining transit share(s)")
      ->delimiter(',');
  thr->add_option("--t", ts, "Transmissibility value(s)")->delimiter(',');
  thr->add_option("--oracle-samples", oracle_samples,
                  "Percolation samples per row (0: none)");
  thr->add_option("--seed", thr_seed, "Oracle seed");
  thr->add_option("--out", thr_out, "Output directory")->required();

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic town");
  std::string gen_out;
  std::size_t gen_persons = 2000;
  std::optional<std::size_t> gen_locations;
  std::uint64_t gen_seed = 1;
  double gen_fraction = 0.2;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--synthetic-scale", gen_persons, "Persons");
  gen->add_option("--locations", gen_locations, "Locations (homes included)");
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--transit-fraction", gen_fraction, "Transit eligible share");

  // replay
  auto* rep = app.add_subcommand("replay", "Rerun a command from its manifest");
  std::string manifest_path;
  std::string rep_out;
  rep->add_option("--manifest", manifest_path, "manifest.json")->required();
  rep->add_option("--out", rep_out, "Output directory")->required();

  try {
    try {
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app.parse(reversed);
    } catch (CLI::ParseError const& e) {
      if (e.get_exit_code() == 0) {
        return app.exit(e, out, err);
      }
      throw config_error{e.what()};
    }
    if (threads > 0) {
      omp_set_num_threads(threads);
    }

    if (sim->parsed()) {
      auto cfg = config_path.empty() ? simulation_config{}
                                     : load_simulation_config(config_path);
      if (seed) {
        cfg.scenario.seed = *seed;
      }
      if (pttcr) {
        cfg.scenario.pttcr_reduction = *pttcr;
        cfg.grid.pttcr_values.clear();
      }
      if (h_minutes) {
        cfg.scenario.h_threshold = parse_minutes_or_inf(*h_minutes);
        cfg.grid.h_values.clear();
      }
      if (r0) {
        cfg.scenario.r0_target = *r0;
        cfg.scenario.beta.reset();
        cfg.grid.r0_values.clear();
      }
      if (beta) {
        cfg.scenario.beta = *beta;
        cfg.scenario.r0_target.reset();
        cfg.grid.r0_values.clear();
      }
      if (close_schools) {
        cfg.scenario.school_closure = true;
        cfg.grid.closure_values.clear();
      }
      if (days) {
        cfg.scenario.days = *days;
      }
      if (replicates) {
        cfg.scenario.replicates = *replicates;
      }
      if (scale) {
        cfg.population.activities.reset();
        cfg.population.gtfs.reset();
        cfg.population.synthetic_persons = *scale;
        cfg.population.synthetic_locations = locations;
      } else if (locations) {
        cfg.population.synthetic_locations = locations;
      }
      if (!cfg.scenario.r0_target && !cfg.scenario.beta) {
        cfg.scenario.r0_target = 2.1;
      }
      cfg.validate();
      json a{{"config", serialize_simulation_config(cfg)},
             {"export_edges", export_edges},
             {"export_transit", export_transit}};
      auto run = simulate(a);
      write_outputs(out_dir, run);
      out << fmt::format("wrote {} files to {}\n", run.files.size() + 1,
                         out_dir);
    } else if (thr->parsed()) {
      json a{{"alpha", alphas},
             {"t", ts},
             {"oracle_samples", oracle_samples},
             {"seed", thr_seed}};
      if (!edges_path.empty()) {
        a["edges"] = absolute_path(edges_path);
        if (persons) {
          a["persons"] = *persons;
        }
      } else if (!thr_config.empty()) {
        a["config"] =
            serialize_simulation_config(load_simulation_config(thr_config));
      } else {
        throw config_error{"threshold needs --edges or --config"};
      }
      for (auto const x : alphas) {
        intervention_alpha{x};
      }
      for (auto const t : ts) {
        if (!(t >= 0.0 && t <= 1.0)) {
          throw config_error{fmt::format("T = {} outside [0, 1]", t)};
        }
      }
      auto run = threshold(a);
      write_outputs(thr_out, run);
      out << fmt::format("wrote threshold report to {}\n", thr_out);
    } else if (gen->parsed()) {
      json a{{"persons", gen_persons},
             {"locations",
              gen_locations.value_or(default_synthetic_locations(gen_persons))},
             {"seed", gen_seed},
             {"transit_fraction", gen_fraction}};
      auto run = generate(a);
      write_outputs(gen_out, run);
      out << fmt::format("wrote synthetic town to {}\n", gen_out);
    } else if (rep->parsed()) {
      replay(manifest_path, rep_out, out);
    }
    return kExitOk;
  } catch (config_error const& e) {
    err << error_json("config_error", e.what()).dump() << '\n';
    return kExitConfig;
  } catch (data_error const& e) {
    auto j = error_json("data_error", e.what());
    j["code"] = to_string(e.code());
    j["file"] = e.file();
    j["line"] = e.line();
    j["subject"] = e.subject();
    err << j.dump() << '\n';
    return kExitData;
  } catch (model_error const& e) {
    auto j = error_json("model_error", e.what());
    j["code"] = to_string(e.code());
    err << j.dump() << '\n';
    return kExitRuntime;
  } catch (std::exception const& e) {
    err << error_json("runtime_error", e.what()).dump() << '\n';
    return kExitRuntime;
  }
}

int run_cli(int argc, char const* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace transitepi
