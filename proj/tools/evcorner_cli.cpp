// evcorner: command-line front end for the ordered-surface corner detector,
// its baselines, the cost model and the evaluation harness.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evcorner/evcorner.hpp"

namespace {

using namespace evcorner;

struct Globals {
  std::string config_path;
  std::uint64_t seed = 1;
  std::map<std::string, std::string> flags;  // config keys given on the command line
};

// Defaults < config file < command-line flags.
RunConfig resolve_config(const Globals& g, CLI::App& app) {
  ConfigMap m;
  if (!g.config_path.empty()) m = load_config_file(g.config_path);
  for (const auto& key : config_keys()) {
    if (app.count(std::string("--") + key.name) > 0) m[key.name] = g.flags.at(key.name);
  }
  return make_run_config(m);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<Event> load_input(const std::string& path, const RunConfig& cfg, bool drop) {
  auto loaded = load_events(path, cfg.geometry, LoadOptions{drop});
  if (loaded.dropped > 0) {
    std::fprintf(stderr, "dropped %zu out-of-bounds events\n", loaded.dropped);
  }
  return std::move(loaded.events);
}

// ---------------------------------------------------------------------------

struct DetectArgs {
  std::string input;
  std::string output;
  std::string detector = "proposed";
  bool drop = false;
};

int cmd_detect(const DetectArgs& a, const RunConfig& cfg) {
  const auto kind = parse_detector(a.detector);
  const auto start = std::chrono::steady_clock::now();
  const auto events = load_input(a.input, cfg, a.drop);
  const auto signal = stcf_filter(events, cfg.geometry, cfg.stcf);
  const auto run = run_detector(kind, signal, cfg);
  write_corners(a.output, run.results);
  std::size_t corners = 0;
  for (const auto& r : run.results) corners += r.is_corner;
  std::printf("detector:       %s\n", a.detector.c_str());
  std::printf("events:         %zu\n", events.size());
  std::printf("signal events:  %zu\n", signal.size());
  std::printf("noise events:   %zu\n", events.size() - signal.size());
  if (kind == DetectorKind::Proposed) {
    std::printf("batches:        %zu\n", run.batches);
  } else if (kind == DetectorKind::LuvHarris) {
    std::printf("lut rebuilds:   %zu\n", run.batches);
  }
  std::printf("results:        %zu\n", run.results.size());
  std::printf("corners:        %zu\n", corners);
  std::printf("wall time:      %.3f s\n", seconds_since(start));
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string input;
  std::string labels;
  bool synthetic = false;
  std::vector<std::string> detectors{"proposed"};
  std::vector<double> thresholds;
  std::string out_prefix;
  bool drop = false;
};

int cmd_sweep(const SweepArgs& a, const RunConfig& cfg, std::uint64_t seed) {
  std::vector<Event> events;
  GroundTruth truth;
  if (a.synthetic) {
    auto scene = default_square_scene();
    scene.geometry = cfg.geometry;
    scene.corner_radius = cfg.corner_radius;
    auto data = generate_synthetic(scene, seed);
    events = std::move(data.events);
    truth = std::move(data.truth);
  } else {
    if (a.input.empty() || a.labels.empty()) {
      throw std::invalid_argument("sweep needs ground truth: pass --input with --labels, or --synthetic");
    }
    events = load_input(a.input, cfg, a.drop);
    truth = load_labels(a.labels, events.size(), a.input);
  }
  std::vector<DetectorKind> kinds;
  for (const auto& d : a.detectors) kinds.push_back(parse_detector(d));
  std::vector<double> thresholds = a.thresholds;
  std::sort(thresholds.begin(), thresholds.end());

  const auto cmp = compare_detectors(events, truth, kinds, cfg, thresholds);
  nlohmann::json summary;
  summary["events"] = cmp.raw_events;
  summary["signal_events"] = cmp.signal_events;
  summary["evaluated_events"] = cmp.evaluated;
  summary["detectors"] = nlohmann::json::array();
  for (const auto& c : cmp.curves) {
    const std::string name = detector_name(c.kind);
    const std::string path = a.out_prefix + "_" + name + ".csv";
    std::ofstream csv(path, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot open '" + path + "' for writing");
    csv << "threshold,precision,recall\n";
    char line[128];
    for (const auto& p : c.curve) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", p.threshold, p.precision, p.recall);
      csv << line;
    }
    if (!csv) throw IoError("write failed for '" + path + "'");
    summary["detectors"].push_back({{"name", name}, {"csv", path}, {"points", c.curve.size()}, {"pr_auc", c.auc}});
    std::printf("%-10s PR-AUC %.4f  (%zu points) -> %s\n", name.c_str(), c.auc, c.curve.size(), path.c_str());
  }
  const std::string json_path = a.out_prefix + "_summary.json";
  std::ofstream js(json_path, std::ios::binary | std::ios::trunc);
  if (!js) throw IoError("cannot open '" + json_path + "' for writing");
  js << summary.dump(2) << '\n';
  if (!js) throw IoError("write failed for '" + json_path + "'");
  std::printf("evaluated %zu of %zu signal events (%zu raw)\n", cmp.evaluated, cmp.signal_events, cmp.raw_events);
  return 0;
}

// ---------------------------------------------------------------------------

struct CostArgs {
  std::string measure;
  std::string json;
  bool drop = false;
};

int cmd_cost(const CostArgs& a, const RunConfig& cfg) {
  CostReport report;
  if (a.measure.empty()) {
    report = analytic_report(cfg.cost, cfg.sparsity, cfg.clock_hz);
  } else {
    const auto events = load_input(a.measure, cfg, a.drop);
    const auto signal = stcf_filter(events, cfg.geometry, cfg.stcf);
    const auto ours = run_detector(DetectorKind::Proposed, signal, cfg);
    const auto luv = run_detector(DetectorKind::LuvHarris, signal, cfg);
    report = measured_report(ours.counters, luv.counters, cfg.cost, cfg.sparsity, cfg.clock_hz);
  }
  std::cout << format_table(report);
  const auto j = to_json(report);
  if (a.json.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream out(a.json, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + a.json + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + a.json + "'");
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string events;
  std::string labels;
  double side = 70.0;
  double vx = 200.0;
  double vy = 60.0;
  double omega = 1.0;
  double duration_s = 1.0;
  double noise_hz = 5800.0;
  int events_per_crossing = 3;
};

int cmd_synth(const SynthArgs& a, const RunConfig& cfg, std::uint64_t seed) {
  auto scene = default_square_scene();
  const double h = a.side / 2.0;
  scene.vertices = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
  scene.velocity = {a.vx, a.vy};
  scene.angular_velocity = a.omega;
  scene.duration_us = static_cast<Timestamp>(std::llround(a.duration_s * 1e6));
  scene.noise_rate_hz = a.noise_hz;
  scene.events_per_crossing = a.events_per_crossing;
  scene.geometry = cfg.geometry;
  scene.corner_radius = cfg.corner_radius;
  const auto data = generate_synthetic(scene, seed);
  write_events(a.events, data.events);
  write_labels(a.labels, data.truth);
  std::size_t corners = 0;
  for (bool b : data.truth) corners += b;
  std::printf("wrote %zu events (%zu corner-labelled) to %s, labels to %s\n", data.events.size(), corners,
              a.events.c_str(), a.labels.c_str());
  return 0;
}

// ---------------------------------------------------------------------------

struct FilterArgs {
  std::string input;
  std::string output;
  bool drop = false;
};

int cmd_filter(const FilterArgs& a, const RunConfig& cfg) {
  const auto events = load_input(a.input, cfg, a.drop);
  const auto signal = stcf_filter(events, cfg.geometry, cfg.stcf);
  write_events(a.output, signal);
  std::printf("kept %zu of %zu events (%zu noise)\n", signal.size(), events.size(), events.size() - signal.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-camera corner detection with ordered surfaces, baselines and cost model"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed for synthetic data");
  for (const auto& key : config_keys()) {
    app.add_option(std::string("--") + key.name, g.flags[key.name],
                   std::string(key.help) + " [default " + key.default_value + "]");
  }

  auto* detect = app.add_subcommand("detect", "run a detector over an event file");
  DetectArgs da;
  detect->add_option("-i,--input", da.input, "event file (t x y p)")->required();
  detect->add_option("-o,--output", da.output, "corner output file")->required();
  detect->add_option("--detector", da.detector, "proposed | eharris | luvharris");
  detect->add_flag("--drop-out-of-bounds", da.drop, "skip events outside the sensor instead of failing");

  auto* sweep = app.add_subcommand("sweep", "precision/recall threshold sweep");
  SweepArgs sa;
  sweep->add_option("-i,--input", sa.input, "event file");
  sweep->add_option("-l,--labels", sa.labels, "label file aligned with the event file");
  sweep->add_flag("--synthetic", sa.synthetic, "use the default synthetic square scene as ground truth");
  sweep->add_option("--detectors", sa.detectors, "detectors to compare")->delimiter(',');
  sweep->add_option("--thresholds", sa.thresholds, "explicit thresholds (default: score quantiles)")->delimiter(',');
  sweep->add_option("-o,--out-prefix", sa.out_prefix, "output prefix for <prefix>_<detector>.csv")->required();
  sweep->add_flag("--drop-out-of-bounds", sa.drop, "skip events outside the sensor instead of failing");

  auto* cost = app.add_subcommand("cost", "analytic (and optionally measured) resource report");
  CostArgs ca;
  cost->add_option("--measure", ca.measure, "event file to run both pipelines on")->check(CLI::ExistingFile);
  cost->add_option("--json", ca.json, "write the JSON report here instead of stdout");
  cost->add_flag("--drop-out-of-bounds", ca.drop, "skip events outside the sensor instead of failing");

  auto* synth = app.add_subcommand("synth", "generate a synthetic square scene with corner labels");
  SynthArgs ya;
  synth->add_option("--events", ya.events, "event output file")->required();
  synth->add_option("--labels", ya.labels, "label output file")->required();
  synth->add_option("--side", ya.side, "square side (px)");
  synth->add_option("--vx", ya.vx, "velocity x (px/s)");
  synth->add_option("--vy", ya.vy, "velocity y (px/s)");
  synth->add_option("--omega", ya.omega, "angular velocity (rad/s)");
  synth->add_option("--duration", ya.duration_s, "duration (s)");
  synth->add_option("--noise-rate", ya.noise_hz, "uniform noise (events/s)");
  synth->add_option("--events-per-crossing", ya.events_per_crossing, "events per edge crossing");

  auto* filter = app.add_subcommand("filter", "STCF-only pass: keep signal events");
  FilterArgs fa;
  filter->add_option("-i,--input", fa.input, "event file")->required();
  filter->add_option("-o,--output", fa.output, "filtered event file")->required();
  filter->add_flag("--drop-out-of-bounds", fa.drop, "skip events outside the sensor instead of failing");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = resolve_config(g, app);
    if (detect->parsed()) return cmd_detect(da, cfg);
    if (sweep->parsed()) return cmd_sweep(sa, cfg, g.seed);
    if (cost->parsed()) return cmd_cost(ca, cfg);
    if (synth->parsed()) return cmd_synth(ya, cfg, g.seed);
    if (filter->parsed()) return cmd_filter(fa, cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
