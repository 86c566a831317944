#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "topomap/global_map.hpp"
#include "topomap/io.hpp"
#include "topomap/scenario_file.hpp"
#include "topomap/svg.hpp"
#include "topomap/swarm.hpp"

namespace topomap::pipeline {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

enum ExitCode : int { kSuccess = 0, kValidation = 1, kRuntime = 2, kReplayMismatch = 3 };

/// Failure carrying the stage it happened in and the process exit code.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what, int code)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), code_(code) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }
  [[nodiscard]] int code() const { return code_; }

 private:
  std::string stage_;
  int code_;
};

struct Overrides {
  std::optional<std::size_t> windows;
  std::optional<double> overlap;
  std::optional<double> cutoff;
  std::optional<double> persistence_threshold;
  std::optional<StaticZeroing> static_zeroing;
};

struct RunOptions {
  fs::path scenario;
  std::uint64_t seed = 1;
  fs::path out;
  Overrides overrides;
  bool trajectories = false;
  bool svg = true;
};

inline void apply(const Overrides& o, ScenarioConfig& c) {
  if (o.windows) c.windows.count = *o.windows;
  if (o.overlap) c.windows.overlap = *o.overlap;
  if (o.cutoff) c.mapping.cluster_cutoff = *o.cutoff;
  if (o.persistence_threshold) c.mapping.persistence_threshold = *o.persistence_threshold;
  if (o.static_zeroing) c.mapping.static_zeroing = *o.static_zeroing;
}

inline ordered_json overrides_json(const Overrides& o) {
  ordered_json j = ordered_json::object();
  if (o.windows) j["windows"] = *o.windows;
  if (o.overlap) j["overlap"] = *o.overlap;
  if (o.cutoff) j["cutoff"] = *o.cutoff;
  if (o.persistence_threshold) j["persistence_threshold"] = *o.persistence_threshold;
  if (o.static_zeroing) j["static_zeroing"] = to_string(*o.static_zeroing);
  return j;
}

inline Overrides overrides_from_json(const ordered_json& j) {
  Overrides o;
  if (j.contains("windows")) o.windows = j["windows"].get<std::size_t>();
  if (j.contains("overlap")) o.overlap = j["overlap"].get<double>();
  if (j.contains("cutoff")) o.cutoff = j["cutoff"].get<double>();
  if (j.contains("persistence_threshold")) {
    o.persistence_threshold = j["persistence_threshold"].get<double>();
  }
  if (j.contains("static_zeroing")) {
    o.static_zeroing = parse_static_zeroing(j["static_zeroing"].get<std::string>());
  }
  return o;
}

/// Every parameter that influences the outputs.
inline ordered_json parameter_snapshot(const ScenarioConfig& c) {
  const auto pt = [](Vec2 p) { return ordered_json::array({p.x, p.y}); };
  ordered_json obstacles = ordered_json::array();
  for (const Obstacle& o : c.environment.obstacles) {
    ordered_json poly = ordered_json::array();
    for (Vec2 v : o.polygon) poly.push_back(pt(v));
    obstacles.push_back(poly);
  }
  const AgentParams& a = c.agents;
  const MappingParams& m = c.mapping;
  return {
      {"name", c.name},
      {"environment", {{"width", c.environment.width}, {"height", c.environment.height},
                       {"obstacles", obstacles}}},
      {"leader", {{"start", pt(c.leader.start)}, {"velocity", pt(c.leader.velocity)},
                  {"coverage_length", c.leader.coverage_length}}},
      {"agents", {{"count", a.count}, {"landmark_fraction", a.landmark_fraction},
                  {"speed", a.speed}, {"segment_length", a.segment_length},
                  {"detection_radius", a.detection_radius},
                  {"stop_probability", a.stop_probability},
                  {"stop_duration_mean", a.stop_duration_mean}, {"sim_dt", a.sim_dt},
                  {"burn_in", a.burn_in}, {"obstacle_clearance", a.obstacle_gap()},
                  {"agent_clearance", a.agent_gap()}, {"return_noise", a.return_noise},
                  {"initial_center", pt(a.initial_center)},
                  {"initial_radius", a.initial_radius}}},
      {"windows", {{"total_time", c.windows.total_time}, {"count", c.windows.count},
                   {"overlap", c.windows.overlap}}},
      {"tda", {{"knn_k", m.knn_k}, {"cluster_cutoff", m.cluster_cutoff},
               {"persistence_threshold", m.persistence_threshold},
               {"subsample_size", m.subsample_size}, {"density_quantile", m.density_quantile},
               {"density_percentile", m.density_percentile},
               {"max_epsilon_factor", m.max_epsilon_factor},
               {"min_component_size", m.min_component_size},
               {"static_zeroing", to_string(m.static_zeroing)}}},
  };
}

inline std::string config_hash(const std::string& scenario_sha, const ordered_json& snapshot,
                               std::uint64_t seed) {
  return io::sha256_hex(scenario_sha + "\n" + snapshot.dump() + "\n" + std::to_string(seed));
}

/// Writes artifacts under one output directory and remembers their hashes.
class ArtifactWriter {
 public:
  ArtifactWriter(fs::path root, std::string hash) : root_(std::move(root)), hash_(std::move(hash)) {}

  void write(const std::string& relative, const std::string& content) {
    io::write_file(root_ / relative, content);
    artifacts_[relative] = io::sha256_hex(content);
  }
  [[nodiscard]] const std::string& hash() const { return hash_; }
  [[nodiscard]] const fs::path& root() const { return root_; }
  [[nodiscard]] const std::map<std::string, std::string>& artifacts() const { return artifacts_; }

 private:
  fs::path root_;
  std::string hash_;
  std::map<std::string, std::string> artifacts_;
};

struct Prepared {
  ScenarioConfig config;
  std::string scenario_sha;
  ordered_json snapshot;
  std::string hash;
};

inline Prepared prepare(const RunOptions& opts) {
  Prepared p;
  std::string text;
  try {
    text = io::read_file(opts.scenario);
    p.config = parse_scenario(text);
  } catch (const std::exception& e) {
    throw StageError("load", e.what(), kValidation);
  }
  apply(opts.overrides, p.config);
  if (const auto violations = validate(p.config); !violations.empty()) {
    std::string msg = "invalid scenario";
    for (const auto& v : violations) msg += "\n  " + v;
    throw StageError("validate", msg, kValidation);
  }
  p.scenario_sha = io::sha256_hex(text);
  p.snapshot = parameter_snapshot(p.config);
  p.hash = config_hash(p.scenario_sha, p.snapshot, opts.seed);
  return p;
}

inline void write_simulation(ArtifactWriter& w, const SimulationResult& sim, bool trajectories) {
  w.write("events.csv", io::events_csv(sim.events, w.hash()));
  w.write("static_intervals.csv", io::static_csv(sim.static_log, w.hash()));
  if (trajectories) w.write("trajectories.csv", io::trajectory_csv(sim.trajectory, w.hash()));
}

inline std::vector<io::PointRow> point_rows(const EmbeddedPointCloud& cloud,
                                            std::span<const EncounterEvent> events) {
  return io::read_points(io::points_csv(cloud, events, ""));
}

inline ordered_json global_json(const MappingResult& r, std::size_t windows) {
  ordered_json nodes = ordered_json::array();
  for (const GlobalNode& n : r.global.nodes) {
    nodes.push_back({{"map", n.map_index}, {"component", n.component},
                     {"robust_holes", n.robust_holes}});
  }
  ordered_json edges = ordered_json::array();
  for (const GlobalEdge& e : r.global.edges) {
    edges.push_back({{"seam", e.seam}, {"cluster", e.cluster}, {"from", e.from}, {"to", e.to}});
  }
  ordered_json seams = ordered_json::array();
  for (const SeamResult& s : r.seams) {
    seams.push_back({{"seam", s.cloud.seam},
                     {"static_ids", s.cloud.static_ids},
                     {"cloud_size", s.cloud.events.size()},
                     {"clusters", cluster_count(s.clusters.labels)},
                     {"connections", s.clusters.connection_count()}});
  }
  ordered_json maps = ordered_json::array();
  for (const LocalMap& m : r.local_maps) {
    maps.push_back({{"index", m.index},
                    {"window", {io::format_double(m.window.begin), io::format_double(m.window.end)}},
                    {"events", m.events.size()},
                    {"dropped_events", m.dropped_events},
                    {"degenerate", m.degenerate},
                    {"graph_components", m.components.size()},
                    {"robust_components", m.features.robust_components},
                    {"robust_holes", m.features.robust_holes},
                    {"map_components", m.component_count}});
  }
  return {{"windows", windows},       {"local_maps", maps},
          {"seams", seams},           {"nodes", nodes},
          {"edges", edges},           {"components", r.global.components},
          {"seam_cycles", r.global.seam_cycles}, {"local_holes", r.global.local_holes},
          {"holes", r.global.holes()}, {"warnings", r.global.warnings}};
}

inline svg::GlobalView global_view(const ordered_json& j) {
  svg::GlobalView v;
  v.windows = j.at("windows").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    v.nodes.push_back({n.at("map").get<std::size_t>(), n.at("component").get<std::size_t>(),
                       n.at("robust_holes").get<std::size_t>()});
  }
  for (const auto& e : j.at("edges")) {
    v.edges.push_back({e.at("seam").get<std::size_t>(), e.at("cluster").get<std::size_t>(),
                       e.at("from").get<std::size_t>(), e.at("to").get<std::size_t>()});
  }
  v.components = j.at("components").get<std::size_t>();
  v.holes = j.at("holes").get<std::size_t>();
  return v;
}

inline std::string window_dir(std::size_t i) { return "window_" + std::to_string(i); }

inline std::string component_dir(std::size_t i, std::size_t c) {
  return window_dir(i) + "/component_" + std::to_string(c);
}

inline MappingResult write_maps(ArtifactWriter& w, const ScenarioConfig& config,
                                std::span<const EncounterEvent> events,
                                const StaticIntervalLog& log, bool with_svg) {
  const WindowGrid grid(config.windows);
  MappingResult r = build_maps(events, log, grid, config.mapping);
  for (const LocalMap& m : r.local_maps) {
    std::vector<svg::ComponentView> views;
    for (std::size_t c = 0; c < m.components.size(); ++c) {
      const LocalComponent& lc = m.components[c];
      const std::string dir = component_dir(m.index, c);
      w.write(dir + "/points.csv", io::points_csv(lc.cloud, events, w.hash()));
      w.write(dir + "/diagram.csv", io::diagram_csv(lc.diagram, w.hash()));
      const ordered_json f = {{"threshold", lc.features.threshold},
                              {"max_epsilon", lc.max_epsilon},
                              {"robust_components", lc.features.robust_components},
                              {"robust_holes", lc.features.robust_holes},
                              {"events", lc.events.size()},
                              {"stress", lc.cloud.stress},
                              {"config_hash", w.hash()}};
      w.write(dir + "/features.json", f.dump(2) + "\n");
      views.push_back({point_rows(lc.cloud, events), lc.diagram, lc.features.threshold});
      if (with_svg) {
        w.write(dir + "/diagram.svg",
                svg::persistence_diagram(lc.diagram, lc.features.threshold, w.hash()));
      }
    }
    if (with_svg) w.write(window_dir(m.index) + "/sketch.svg", svg::local_sketch(views, w.hash()));
  }
  for (const SeamResult& s : r.seams) {
    const std::string dir = "seam_" + std::to_string(s.cloud.seam);
    w.write(dir + "/dendrogram.csv", io::dendrogram_csv(s.clusters.dendrogram, w.hash()));
    w.write(dir + "/cloud.csv", io::seam_cloud_csv(s.cloud, s.clusters, events, w.hash()));
  }
  ordered_json g = global_json(r, grid.count());
  g["config_hash"] = w.hash();
  w.write("global_map.json", g.dump(2) + "\n");
  if (with_svg) w.write("global_map.svg", svg::global_map(global_view(g), w.hash()));
  return r;
}

inline const char* kPartialMarker = ".partial";

struct RunReport {
  std::string config_hash;
  std::map<std::string, std::string> artifacts;
  std::optional<MappingResult> maps;
  SimulationResult simulation;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Manifest goes last; timings live in their own file so manifests stay
/// byte-identical across runs.
inline void finish(ArtifactWriter& w, const std::string& command, const RunOptions& opts,
                   const Prepared& p, const ordered_json& timings,
                   const std::optional<fs::path>& input = std::nullopt) {
  ordered_json artifacts = ordered_json::object();
  for (const auto& [path, sha] : w.artifacts()) artifacts[path] = sha;
  ordered_json m = {{"command", command},
                    {"scenario", opts.scenario.string()},
                    {"scenario_sha256", p.scenario_sha},
                    {"seed", opts.seed},
                    {"config_hash", p.hash},
                    {"overrides", overrides_json(opts.overrides)},
                    {"trajectories", opts.trajectories},
                    {"svg", opts.svg},
                    {"parameters", p.snapshot},
                    {"artifacts", artifacts}};
  if (input) m["input"] = input->string();
  io::write_file(w.root() / "manifest.json", m.dump(2) + "\n");
  ordered_json t = timings;
  t["config_hash"] = p.hash;
  io::write_file(w.root() / "timings.json", t.dump(2) + "\n");
  fs::remove(w.root() / kPartialMarker);
}

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw StageError(name, e.what(), kValidation);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), kRuntime);
  }
}

inline void mark_partial(const fs::path& out) {
  io::write_file(out / kPartialMarker, "incomplete run\n");
}

/// simulate -> local maps -> seams -> stitch, all artifacts under opts.out.
inline RunReport run_pipeline(const RunOptions& opts, bool with_maps = true) {
  const Prepared p = prepare(opts);
  mark_partial(opts.out);
  ArtifactWriter w(opts.out, p.hash);
  ordered_json timings = ordered_json::object();
  RunReport report;
  report.config_hash = p.hash;

  auto t0 = Clock::now();
  report.simulation =
      stage("simulate", [&] { return run(p.config, opts.seed, opts.trajectories); });
  stage("write events", [&] {
    write_simulation(w, report.simulation, opts.trajectories);
    return 0;
  });
  timings["simulate"] = seconds_since(t0);

  if (with_maps) {
    t0 = Clock::now();
    report.maps = stage("map", [&] {
      return write_maps(w, p.config, report.simulation.events, report.simulation.static_log,
                        opts.svg);
    });
    timings["map"] = seconds_since(t0);
  }
  finish(w, with_maps ? "pipeline" : "simulate", opts, p, timings);
  report.artifacts = w.artifacts();
  return report;
}

/// Maps a previous simulate run read back from `input`.
inline RunReport run_map(const RunOptions& opts, const fs::path& input) {
  const Prepared p = prepare(opts);
  mark_partial(opts.out);
  ArtifactWriter w(opts.out, p.hash);
  RunReport report;
  report.config_hash = p.hash;
  auto t0 = Clock::now();
  stage("read events", [&] {
    report.simulation.events = io::read_events(io::read_file(input / "events.csv"));
    report.simulation.static_log = io::read_static(io::read_file(input / "static_intervals.csv"));
    return 0;
  });
  report.maps = stage("map", [&] {
    return write_maps(w, p.config, report.simulation.events, report.simulation.static_log,
                      opts.svg);
  });
  finish(w, "map", opts, p, ordered_json{{"map", seconds_since(t0)}}, input);
  report.artifacts = w.artifacts();
  return report;
}

/// Re-renders every SVG of a mapped output directory from its CSV/JSON files.
inline std::size_t render(const fs::path& dir) {
  const ordered_json g = ordered_json::parse(io::read_file(dir / "global_map.json"));
  const std::string hash = g.at("config_hash").get<std::string>();
  std::size_t written = 0;
  for (std::size_t i = 1; i <= g.at("windows").get<std::size_t>(); ++i) {
    std::vector<svg::ComponentView> views;
    for (std::size_t c = 0; fs::exists(dir / component_dir(i, c)); ++c) {
      const fs::path cdir = dir / component_dir(i, c);
      svg::ComponentView v;
      v.points = io::read_points(io::read_file(cdir / "points.csv"));
      v.diagram = io::read_diagram(io::read_file(cdir / "diagram.csv"));
      v.threshold = ordered_json::parse(io::read_file(cdir / "features.json"))
                        .at("threshold")
                        .get<double>();
      io::write_file(cdir / "diagram.svg", svg::persistence_diagram(v.diagram, v.threshold, hash));
      views.push_back(std::move(v));
      ++written;
    }
    io::write_file(dir / window_dir(i) / "sketch.svg", svg::local_sketch(views, hash));
    ++written;
  }
  io::write_file(dir / "global_map.svg", svg::global_map(global_view(g), hash));
  return written + 1;
}

struct ReplayOutcome {
  bool matched = true;
  std::vector<std::string> mismatches;
  RunReport report;
};

/// Re-executes the run a manifest describes. Without a seed override the new
/// artifacts must hash identically to the recorded ones.
inline ReplayOutcome replay(const fs::path& manifest_path, const fs::path& out,
                            std::optional<std::uint64_t> seed_override = std::nullopt) {
  const ordered_json m = stage("read manifest", [&] {
    return ordered_json::parse(io::read_file(manifest_path));
  });
  RunOptions opts;
  opts.scenario = m.at("scenario").get<std::string>();
  opts.seed = seed_override.value_or(m.at("seed").get<std::uint64_t>());
  opts.out = out;
  opts.overrides = overrides_from_json(m.at("overrides"));
  opts.trajectories = m.at("trajectories").get<bool>();
  opts.svg = m.at("svg").get<bool>();

  const std::string text = stage("read scenario", [&] { return io::read_file(opts.scenario); });
  if (io::sha256_hex(text) != m.at("scenario_sha256").get<std::string>()) {
    throw StageError("replay", "scenario file hash does not match manifest: " +
                                   opts.scenario.string(), kReplayMismatch);
  }

  ReplayOutcome outcome;
  const std::string command = m.at("command").get<std::string>();
  if (command == "map") {
    outcome.report = run_map(opts, m.at("input").get<std::string>());
  } else {
    outcome.report = run_pipeline(opts, command == "pipeline");
  }
  if (seed_override && *seed_override != m.at("seed").get<std::uint64_t>()) return outcome;

  const auto& recorded = m.at("artifacts");
  for (const auto& [path, sha] : recorded.items()) {
    auto it = outcome.report.artifacts.find(path);
    if (it == outcome.report.artifacts.end() || it->second != sha.get<std::string>()) {
      outcome.mismatches.push_back(path);
    }
  }
  for (const auto& [path, sha] : outcome.report.artifacts) {
    if (!recorded.contains(path)) outcome.mismatches.push_back(path);
  }
  outcome.matched = outcome.mismatches.empty();
  return outcome;
}

}  // namespace topomap::pipeline
