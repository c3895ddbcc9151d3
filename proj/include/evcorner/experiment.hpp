#pragma once

// Runs the detectors over a common filtered stream and scores them against
// per-event ground truth.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcorner/baselines.hpp"
#include "evcorner/config.hpp"
#include "evcorner/detector.hpp"
#include "evcorner/eval.hpp"
#include "evcorner/noise_filter.hpp"

namespace evcorner {

enum class DetectorKind { Proposed, EHarris, LuvHarris };

inline DetectorKind parse_detector(const std::string& name) {
  if (name == "proposed") return DetectorKind::Proposed;
  if (name == "eharris") return DetectorKind::EHarris;
  if (name == "luvharris") return DetectorKind::LuvHarris;
  throw std::invalid_argument("unknown detector '" + name + "' (expected proposed, eharris or luvharris)");
}

inline std::string detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Proposed:
      return "proposed";
    case DetectorKind::EHarris:
      return "eharris";
    case DetectorKind::LuvHarris:
      return "luvharris";
  }
  return "?";
}

struct DetectorRun {
  std::vector<CornerEvent> results;
  CostCounters counters;
  std::size_t batches = 0;
};

/// Runs one detector over events that already passed the noise filter.
/// The proposed detector only reports events of completed batches, so its
/// result list may be shorter than the input; result i always belongs to
/// input event i.
inline DetectorRun run_detector(DetectorKind kind, std::span<const Event> signal, const RunConfig& cfg) {
  DetectorRun run;
  switch (kind) {
    case DetectorKind::Proposed: {
      StcfConfig off = cfg.stcf;
      off.enabled = false;
      CornerPipeline pipeline(cfg.geometry, cfg.core, off);
      run.results = pipeline.run(signal);
      run.counters = pipeline.counters();
      run.batches = pipeline.batches();
      break;
    }
    case DetectorKind::EHarris: {
      EHarrisDetector detector(cfg.geometry, cfg.eharris);
      run.results = detector.run(signal);
      run.counters = detector.counters();
      break;
    }
    case DetectorKind::LuvHarris: {
      LuvHarrisDetector detector(cfg.geometry, cfg.luvharris);
      run.results = detector.run(signal);
      run.counters = detector.counters();
      run.batches = detector.lut().rebuilds();
      break;
    }
  }
  return run;
}

inline std::vector<double> scores_of(std::span<const CornerEvent> results) {
  std::vector<double> s;
  s.reserve(results.size());
  for (const auto& r : results) s.push_back(r.score);
  return s;
}

struct DetectorCurve {
  DetectorKind kind;
  std::vector<PrPoint> curve;
  double auc = 0.0;
};

struct Comparison3 {
  std::size_t raw_events = 0;
  std::size_t signal_events = 0;
  std::size_t evaluated = 0;  // common prefix scored for every detector
  std::vector<DetectorCurve> curves;
};

/// Filters `events` once, runs every requested detector on the signal
/// stream and sweeps thresholds over the prefix every detector scored.
/// With `thresholds` empty each detector gets its own quantile thresholds.
inline Comparison3 compare_detectors(std::span<const Event> events, const GroundTruth& truth,
                                     std::span<const DetectorKind> kinds, const RunConfig& cfg,
                                     std::span<const double> thresholds = {}) {
  if (events.size() != truth.size()) {
    throw std::invalid_argument("ground truth has " + std::to_string(truth.size()) + " labels for " +
                                std::to_string(events.size()) + " events");
  }
  const auto classes = stcf_classify_stream(events, cfg.geometry, cfg.stcf);
  std::vector<Event> signal;
  GroundTruth signal_truth;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (classes[i] == StcfClass::Signal) {
      signal.push_back(events[i]);
      signal_truth.push_back(truth[i]);
    }
  }

  Comparison3 cmp;
  cmp.raw_events = events.size();
  cmp.signal_events = signal.size();
  std::vector<DetectorRun> runs;
  std::size_t common = signal.size();
  for (auto kind : kinds) {
    runs.push_back(run_detector(kind, signal, cfg));
    common = std::min(common, runs.back().results.size());
  }
  cmp.evaluated = common;
  const GroundTruth prefix_truth(signal_truth.begin(), signal_truth.begin() + static_cast<std::ptrdiff_t>(common));
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto all = scores_of(runs[i].results);
    const std::vector<double> scores(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(common));
    DetectorCurve c{kinds[i], {}, 0.0};
    if (thresholds.empty()) {
      const auto auto_thr = quantile_thresholds(scores, cfg.sweep_steps);
      c.curve = sweep_threshold(scores, prefix_truth, auto_thr);
    } else {
      c.curve = sweep_threshold(scores, prefix_truth, thresholds);
    }
    c.auc = pr_auc(c.curve);
    cmp.curves.push_back(std::move(c));
  }
  return cmp;
}

}  // namespace evcorner
