#include <CLI11.hpp>

#include <iostream>

#include "topomap/pipeline.hpp"

namespace tp = topomap::pipeline;

namespace {

struct Flags {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t windows = 0;
  double overlap = -1, cutoff = -1, persistence_threshold = -1;
  std::string static_zeroing;
  bool trajectories = false;
  bool svg = true;
};

void add_run_flags(CLI::App* cmd, Flags& f, bool needs_simulation) {
  cmd->add_option("--scenario", f.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--out", f.out, "output directory")->required();
  cmd->add_option("--windows", f.windows, "number of time windows")->check(CLI::PositiveNumber);
  cmd->add_option("--overlap", f.overlap, "window overlap, seconds")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cutoff", f.cutoff, "seam clustering cutoff")->check(CLI::NonNegativeNumber);
  cmd->add_option("--persistence-threshold", f.persistence_threshold,
                  "robust lifetime, fraction of max epsilon")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--static-zeroing", f.static_zeroing, "landmark zeroing rule")
      ->check(CLI::IsMember({"none", "strict", "same_static_interval"}));
  if (needs_simulation) cmd->add_flag("--trajectories", f.trajectories, "write agent trajectories");
  cmd->add_flag("--svg,!--no-svg", f.svg, "write SVG renderings");
}

tp::RunOptions to_options(const Flags& f) {
  tp::RunOptions o;
  o.scenario = f.scenario;
  o.seed = f.seed;
  o.out = f.out;
  o.trajectories = f.trajectories;
  o.svg = f.svg;
  if (f.windows > 0) o.overrides.windows = f.windows;
  if (f.overlap >= 0) o.overrides.overlap = f.overlap;
  if (f.cutoff >= 0) o.overrides.cutoff = f.cutoff;
  if (f.persistence_threshold >= 0) o.overrides.persistence_threshold = f.persistence_threshold;
  if (!f.static_zeroing.empty()) {
    o.overrides.static_zeroing = topomap::parse_static_zeroing(f.static_zeroing);
  }
  return o;
}

void summarize(const tp::RunReport& r) {
  std::cout << "config hash " << r.config_hash << "\n";
  std::cout << r.simulation.events.size() << " encounter events\n";
  if (!r.maps) return;
  for (const auto& m : r.maps->local_maps) {
    std::cout << "M" << m.index << ": " << m.features.robust_components << " component(s), "
              << m.features.robust_holes << " hole(s)\n";
  }
  for (const auto& s : r.maps->seams) {
    std::cout << "seam " << s.cloud.seam << "-" << s.cloud.seam + 1 << ": "
              << topomap::cluster_count(s.clusters.labels) << " cluster(s), "
              << s.clusters.connection_count() << " connection(s)\n";
  }
  const auto& g = r.maps->global;
  std::cout << "global: " << g.components << " component(s), " << g.holes() << " hole(s)\n";
  for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological mapping from swarm encounter events"};
  app.require_subcommand(1);

  Flags sim_flags, map_flags, pipe_flags;
  auto* simulate = app.add_subcommand("simulate", "run the swarm simulation, write event logs");
  add_run_flags(simulate, sim_flags, true);

  std::string map_input;
  auto* map = app.add_subcommand("map", "build local and global maps from a simulate output");
  add_run_flags(map, map_flags, false);
  map->add_option("--in", map_input, "directory holding events.csv and static_intervals.csv")
      ->required()
      ->check(CLI::ExistingDirectory);

  auto* pipeline = app.add_subcommand("pipeline", "simulate and map in one run");
  add_run_flags(pipeline, pipe_flags, true);

  std::string manifest, replay_out;
  std::uint64_t replay_seed = 0;
  auto* replay = app.add_subcommand("replay", "re-run a manifest and compare artifact hashes");
  replay->add_option("--manifest", manifest, "manifest.json of a previous run")
      ->required()
      ->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "output directory")->required();
  auto* seed_opt = replay->add_option("--seed", replay_seed, "run with a different seed");

  std::string render_dir;
  auto* render = app.add_subcommand("render", "redraw SVGs of a mapped output directory");
  render->add_option("--out", render_dir, "mapped output directory")
      ->required()
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : tp::kValidation;
  }

  try {
    if (*simulate) {
      summarize(tp::run_pipeline(to_options(sim_flags), false));
    } else if (*map) {
      summarize(tp::run_map(to_options(map_flags), map_input));
    } else if (*pipeline) {
      summarize(tp::run_pipeline(to_options(pipe_flags), true));
    } else if (*replay) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = replay_seed;
      const auto outcome = tp::replay(manifest, replay_out, seed);
      summarize(outcome.report);
      if (!outcome.matched) {
        for (const auto& p : outcome.mismatches) std::cerr << "mismatch: " << p << "\n";
        return tp::kReplayMismatch;
      }
      std::cout << "replay matches manifest\n";
    } else if (*render) {
      std::cout << tp::render(render_dir) << " SVG file(s) written\n";
    }
  } catch (const tp::StageError& e) {
    std::cerr << "error in stage " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tp::kRuntime;
  }
  return tp::kSuccess;
}
