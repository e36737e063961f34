#include "gazekit/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

namespace {

struct FrameMark {
  std::int64_t t_ms = 0;
  std::int64_t dwell_ms = 0;  // tracked dwell: dropout-capped, window-clipped
  std::size_t frame_index = 0;
  bool countable = false;     // false while both eyes are closed
  bool on_target = false;
};

struct MarkSeries {
  std::vector<FrameMark> marks;
  std::int64_t window_start = 0;
  std::int64_t window_end = 0;
  std::int64_t blink_ms = 0;
  std::int64_t untracked_ms = 0;  // dropout gap time inside the window
};

/// Marks every frame inside [start, end). A frame's dwell runs to the next
/// frame's timestamp (nominal dt for the last frame), capped at the dropout
/// tolerance and clipped at the window end; gap time beyond the cap counts
/// as untracked rather than gaze time.
MarkSeries mark_window(std::span<const GazeFrame> frames, std::int64_t start,
                       std::int64_t end, double frame_dt_ms,
                       const std::function<bool(const GazeFrame&)>& on_target) {
  MarkSeries series;
  series.window_start = start;
  series.window_end = end;
  const std::int64_t nominal =
      std::max<std::int64_t>(1, std::llround(frame_dt_ms));
  const std::int64_t cap = std::llround(kDropoutToleranceFactor * frame_dt_ms);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const GazeFrame& f = frames[i];
    if (f.t_ms < start || f.t_ms >= end) {
      continue;
    }
    const std::int64_t full = i + 1 < frames.size()
                                  ? frames[i + 1].t_ms - f.t_ms
                                  : nominal;
    const std::int64_t covered = std::min(std::min(full, cap), end - f.t_ms);
    const std::int64_t reachable = std::min(full, end - f.t_ms);
    series.untracked_ms += reachable - covered;

    FrameMark mark;
    mark.t_ms = f.t_ms;
    mark.dwell_ms = covered;
    mark.frame_index = i;
    mark.countable = !f.eyes_closed();
    mark.on_target = mark.countable && on_target(f);
    if (!mark.countable) {
      series.blink_ms += covered;
    }
    series.marks.push_back(mark);
  }
  return series;
}

struct OffsetTally {
  int count = 0;
  std::int64_t duration_ms = 0;
  bool acquired = false;
  std::int64_t first_on_ms = 0;
};

/// Offsets are maximal off-target runs of countable frames after the first
/// on-target frame; runs shorter than min_run_frames are ignored.
OffsetTally tally_offsets(const std::vector<FrameMark>& marks,
                          int min_run_frames) {
  OffsetTally tally;
  int run_frames = 0;
  std::int64_t run_ms = 0;
  const auto flush = [&] {
    if (run_frames >= min_run_frames) {
      ++tally.count;
      tally.duration_ms += run_ms;
    }
    run_frames = 0;
    run_ms = 0;
  };
  for (const FrameMark& m : marks) {
    if (!m.countable) {
      continue;
    }
    if (m.on_target) {
      if (!tally.acquired) {
        tally.acquired = true;
        tally.first_on_ms = m.t_ms;
      }
      flush();
    } else if (tally.acquired) {
      ++run_frames;
      run_ms += m.dwell_ms;
    }
  }
  flush();
  return tally;
}

GazeHoldStats make_stats(int offset_count, std::int64_t offset_ms,
                         std::int64_t total_ms) {
  GazeHoldStats s;
  s.offset_count = offset_count;
  s.offset_duration_ms = offset_ms;
  s.total_duration_ms = total_ms;
  s.accuracy = total_ms > 0
                   ? static_cast<double>(total_ms - offset_ms) /
                         static_cast<double>(total_ms)
                   : 1.0;
  return s;
}

GazeHoldStats window_stats(const MarkSeries& series, const OffsetTally& tally) {
  const std::int64_t total = (series.window_end - series.window_start) -
                             series.blink_ms - series.untracked_ms;
  return make_stats(tally.count, tally.duration_ms, total);
}

void aggregate_zone(std::map<ScreenZone, GazeHoldStats>& zones, ScreenZone zone,
                    const GazeHoldStats& stats) {
  GazeHoldStats& agg = zones[zone];
  agg.offset_count += stats.offset_count;
  agg.offset_duration_ms += stats.offset_duration_ms;
  agg.total_duration_ms += stats.total_duration_ms;
  agg.accuracy =
      agg.total_duration_ms > 0
          ? static_cast<double>(agg.total_duration_ms - agg.offset_duration_ms) /
                static_cast<double>(agg.total_duration_ms)
          : 1.0;
}

std::span<const GazeFrame> frames_in(std::span<const GazeFrame> frames,
                                     std::int64_t start, std::int64_t end_incl) {
  const auto lo = std::lower_bound(
      frames.begin(), frames.end(), start,
      [](const GazeFrame& f, std::int64_t t) { return f.t_ms < t; });
  const auto hi = std::upper_bound(
      frames.begin(), frames.end(), end_incl,
      [](std::int64_t t, const GazeFrame& f) { return t < f.t_ms; });
  return frames.subspan(static_cast<std::size_t>(lo - frames.begin()),
                        static_cast<std::size_t>(hi - lo));
}

}  // namespace

StaticResults analyze_static(std::span<const GazeFrame> frames,
                             const StaticGazeConfig& cfg,
                             const AnalysisConfig& analysis,
                             double frame_dt_ms) {
  if (frames.empty()) {
    throw ConfigError("analyze_static: no frames");
  }
  StaticResults results;
  std::map<ScreenZone, std::pair<double, int>> zone_rt;  // sum, count
  for (const StaticPoint& pt : cfg.points) {
    if (pt.hold_ms <= 0) {
      throw ConfigError("analyze_static: point \"" + pt.point_id +
                        "\" has a zero-length window");
    }
    const MarkSeries series = mark_window(
        frames, pt.onset_ms, pt.onset_ms + pt.hold_ms, frame_dt_ms,
        [&](const GazeFrame& f) {
          if (!f.left_open || !f.right_open) {
            return false;
          }
          const GazeRay ray = world_gaze_ray(f.head, f.gaze_local);
          return ray_sphere_hit(ray, pt.position, pt.radius).has_value();
        });
    const OffsetTally tally =
        tally_offsets(series.marks, analysis.min_offset_run_frames);

    StaticPointResult entry;
    entry.point_id = pt.point_id;
    entry.zone = pt.zone;
    entry.acquired = tally.acquired;
    if (tally.acquired) {
      entry.reaction_ms = tally.first_on_ms - pt.onset_ms;
      auto& [sum, count] = zone_rt[pt.zone];
      sum += static_cast<double>(*entry.reaction_ms);
      ++count;
    }
    entry.stats = window_stats(series, tally);
    aggregate_zone(results.per_zone, pt.zone, entry.stats);
    results.per_point.push_back(std::move(entry));
  }
  for (const auto& [zone, rt] : zone_rt) {
    results.per_zone_mean_reaction_ms[zone] = rt.first / rt.second;
  }
  return results;
}

DynamicResults analyze_dynamic(std::span<const GazeFrame> frames,
                               const DynamicGazeConfig& cfg,
                               std::int64_t phase_start_ms,
                               std::int64_t phase_end_ms,
                               const VirtualScreen& screen,
                               const AnalysisConfig& analysis,
                               double frame_dt_ms) {
  if (frames.empty()) {
    throw ConfigError("analyze_dynamic: no frames");
  }
  cfg.path.validate();
  const ArcLengthTable table = build_arc_length_table(cfg.path);
  const double travel_s = table.total_length / cfg.target_speed;
  if (travel_s * 1000.0 >
      static_cast<double>(phase_end_ms - phase_start_ms) + 0.5) {
    throw ConfigError("analyze_dynamic: path travel time exceeds phase");
  }

  const auto target_at = [&](std::int64_t t_ms) {
    return dynamic_target_position(cfg, table, phase_start_ms, t_ms);
  };
  const MarkSeries series = mark_window(
      frames, phase_start_ms, phase_end_ms, frame_dt_ms,
      [&](const GazeFrame& f) {
        if (!f.left_open || !f.right_open) {
          return false;
        }
        const GazeRay ray = world_gaze_ray(f.head, f.gaze_local);
        return ray_sphere_hit(ray, target_at(f.t_ms), cfg.radius).has_value();
      });

  DynamicResults results;
  results.overall = window_stats(
      series, tally_offsets(series.marks, analysis.min_offset_run_frames));

  // Fit series plus per-zone grouping over countable frames.
  std::map<ScreenZone, std::vector<FrameMark>> zone_marks;
  std::map<ScreenZone, std::int64_t> zone_dwell;
  double fit_sum = 0.0;
  for (const FrameMark& mark : series.marks) {
    if (!mark.countable) {
      continue;
    }
    const GazeFrame& f = frames[mark.frame_index];
    const GazeRay ray = world_gaze_ray(f.head, f.gaze_local);
    const Vec3 to_target = target_at(f.t_ms) - ray.origin;

    double fit = 1.0;
    if (to_target.norm() > 0.0) {
      const double err = angle_between_deg(ray.direction.vec(), to_target);
      fit = 1.0 - std::min(err, analysis.fit_cap_deg) / analysis.fit_cap_deg;
    }
    results.fit_series.push_back(FitSample{mark.t_ms, fit});
    fit_sum += fit;

    if (to_target.norm() > 0.0) {
      const ScreenPoint sp = project_to_screen(
          GazeRay{ray.origin, UnitDir(to_target)}, f.head, screen);
      if (sp.in_view) {
        const ScreenZone zone = classify_zone(sp);
        zone_marks[zone].push_back(mark);
        zone_dwell[zone] += mark.dwell_ms;
      }
    }
  }
  results.mean_fit = results.fit_series.empty()
                         ? 0.0
                         : fit_sum / static_cast<double>(results.fit_series.size());
  for (const auto& [zone, marks] : zone_marks) {
    const OffsetTally tally =
        tally_offsets(marks, analysis.min_offset_run_frames);
    results.per_zone[zone] =
        make_stats(tally.count, tally.duration_ms, zone_dwell[zone]);
  }
  return results;
}

SaccadicResults analyze_saccadic(std::span<const GazeFrame> frames,
                                 const SaccadicConfig& cfg,
                                 const VirtualScreen& screen,
                                 const AnalysisConfig& analysis,
                                 double frame_dt_ms) {
  (void)screen;  // zones are declared per stimulus
  if (frames.empty()) {
    throw ConfigError("analyze_saccadic: no frames");
  }
  for (std::size_t i = 0; i + 1 < cfg.stimuli.size(); ++i) {
    const std::int64_t end_i =
        cfg.stimuli[i].onset_ms + cfg.timeout_for(cfg.stimuli[i]);
    if (cfg.stimuli[i + 1].onset_ms <= end_i) {
      throw ConfigError("analyze_saccadic: stimulus windows overlap at \"" +
                        cfg.stimuli[i + 1].event_id + "\"");
    }
  }

  SaccadicResults results;
  std::map<ScreenZone, std::pair<double, int>> zone_rt;
  for (const SaccadicStimulus& stim : cfg.stimuli) {
    const std::int64_t timeout = cfg.timeout_for(stim);
    SaccadicResultEntry entry;
    entry.event_id = stim.event_id;
    entry.zone = stim.zone;
    entry.timed_out = true;
    for (const GazeFrame& f : frames_in(frames, stim.onset_ms,
                                        stim.onset_ms + timeout)) {
      if (!f.left_open || !f.right_open) {
        continue;
      }
      const GazeRay ray = world_gaze_ray(f.head, f.gaze_local);
      if (ray_sphere_hit(ray, stim.target_position, cfg.radius)) {
        entry.timed_out = false;
        entry.reaction_ms = f.t_ms - stim.onset_ms;
        break;
      }
    }
    entry.trace = speed_series(
        frames_in(frames, stim.onset_ms - kTraceLeadMs, stim.onset_ms + timeout),
        frame_dt_ms);
    if (!entry.timed_out && analysis.srt_mode == SrtMode::VelocityOnset) {
      // Alternative timing: onset of the saccade itself, taken as the first
      // above-threshold speed sample on the way to the hit. Falls back to
      // the hit time when the gaze drifted in below threshold.
      const std::int64_t hit_ms = stim.onset_ms + *entry.reaction_ms;
      for (const SpeedSample& s : entry.trace) {
        if (s.t_ms > stim.onset_ms && s.t_ms <= hit_ms &&
            s.speed_deg_per_s > analysis.saccade_threshold_deg_s) {
          entry.reaction_ms = s.t_ms - stim.onset_ms;
          break;
        }
      }
    }
    if (entry.timed_out) {
      ++results.timed_out_count;
    } else {
      auto& [sum, count] = zone_rt[stim.zone];
      sum += static_cast<double>(*entry.reaction_ms);
      ++count;
    }
    results.events.push_back(std::move(entry));
  }
  for (const auto& [zone, rt] : zone_rt) {
    results.per_zone_mean_reaction_ms[zone] = rt.first / rt.second;
  }
  return results;
}

ProtocolResults analyze_session(const SessionRecord& record,
                                const TestScript& script) {
  script.validate();
  for (const ScriptPhase& sp : script.phases) {
    const PhaseDescriptor* phase = record.find_phase(sp.phase_id);
    if (phase == nullptr) {
      throw ValidationError("session is missing scripted phase \"" +
                            sp.phase_id + "\"");
    }
    if (phase->kind != sp.kind || phase->start_ms != sp.start_ms ||
        phase->end_ms != sp.end_ms) {
      throw ValidationError("session phase \"" + sp.phase_id +
                            "\" does not match the script");
    }
  }
  for (const PhaseDescriptor& p : record.phases) {
    if (script.find_phase(p.phase_id) == nullptr) {
      throw ValidationError("session phase \"" + p.phase_id +
                            "\" is not in the script");
    }
  }

  ProtocolResults results;
  for (const ScriptPhase& sp : script.phases) {
    const std::vector<GazeFrame> window = slice_phase(record, sp.phase_id);
    if (window.empty()) {
      throw ValidationError("session has no frames in phase \"" + sp.phase_id +
                            "\"");
    }
    if (sp.kind == PhaseKind::StaticGaze) {
      results.static_gaze =
          analyze_static(window, std::get<StaticGazeConfig>(sp.config),
                         script.analysis, record.meta.frame_dt_ms);
    } else if (sp.kind == PhaseKind::DynamicGaze) {
      results.dynamic_gaze = analyze_dynamic(
          window, std::get<DynamicGazeConfig>(sp.config), sp.start_ms,
          sp.end_ms, script.screen, script.analysis, record.meta.frame_dt_ms);
    } else {
      results.saccadic =
          analyze_saccadic(window, std::get<SaccadicConfig>(sp.config),
                           script.screen, script.analysis,
                           record.meta.frame_dt_ms);
    }
  }
  return results;
}

namespace {

json stats_to_json(const GazeHoldStats& s) {
  return json{
      {"offset_count", s.offset_count},
      {"offset_duration_ms", s.offset_duration_ms},
      {"total_duration_ms", s.total_duration_ms},
      {"accuracy", s.accuracy},
  };
}

GazeHoldStats stats_from_json(const json& j, const std::string& at) {
  GazeHoldStats s;
  s.offset_count = static_cast<int>(jsonio::as_integer(
      jsonio::member(j, "offset_count", at), at + ".offset_count"));
  s.offset_duration_ms = jsonio::as_integer(
      jsonio::member(j, "offset_duration_ms", at), at + ".offset_duration_ms");
  s.total_duration_ms = jsonio::as_integer(
      jsonio::member(j, "total_duration_ms", at), at + ".total_duration_ms");
  s.accuracy =
      jsonio::as_number(jsonio::member(j, "accuracy", at), at + ".accuracy");
  return s;
}

json trace_to_json(const std::vector<SpeedSample>& trace) {
  json out = json::array();
  for (const SpeedSample& s : trace) {
    out.push_back(json::array({s.t_ms, s.speed_deg_per_s}));
  }
  return out;
}

std::vector<SpeedSample> trace_from_json(const json& j, const std::string& at) {
  std::vector<SpeedSample> out;
  for (std::size_t i = 0; i < jsonio::as_array(j, at).size(); ++i) {
    const std::string pat = at + "[" + std::to_string(i) + "]";
    const json& pair = j[i];
    if (!pair.is_array() || pair.size() != 2) {
      jsonio::fail(pat, "expected a [t_ms, value] pair");
    }
    out.push_back(SpeedSample{jsonio::as_integer(pair[0], pat + "[0]"),
                              jsonio::as_number(pair[1], pat + "[1]")});
  }
  return out;
}

}  // namespace

std::string serialize_results(const ProtocolResults& results) {
  json doc{{"schema_version", 1}};
  if (results.static_gaze) {
    const StaticResults& r = *results.static_gaze;
    json per_point = json::array();
    for (const StaticPointResult& p : r.per_point) {
      json pj = stats_to_json(p.stats);
      pj["point_id"] = p.point_id;
      pj["zone"] = to_string(p.zone);
      pj["acquired"] = p.acquired;
      if (p.reaction_ms) {
        pj["reaction_ms"] = *p.reaction_ms;
      }
      per_point.push_back(std::move(pj));
    }
    json per_zone = json::object();
    for (const auto& [zone, stats] : r.per_zone) {
      json zj = stats_to_json(stats);
      const auto rt = r.per_zone_mean_reaction_ms.find(zone);
      if (rt != r.per_zone_mean_reaction_ms.end()) {
        zj["mean_reaction_ms"] = rt->second;
      }
      per_zone[to_string(zone)] = std::move(zj);
    }
    doc["static"] = json{{"per_point", std::move(per_point)},
                         {"per_zone", std::move(per_zone)}};
  }
  if (results.dynamic_gaze) {
    const DynamicResults& r = *results.dynamic_gaze;
    json fit = json::array();
    for (const FitSample& s : r.fit_series) {
      fit.push_back(json::array({s.t_ms, s.fit}));
    }
    json per_zone = json::object();
    for (const auto& [zone, stats] : r.per_zone) {
      per_zone[to_string(zone)] = stats_to_json(stats);
    }
    doc["dynamic"] = json{{"overall", stats_to_json(r.overall)},
                          {"mean_fit", r.mean_fit},
                          {"fit_series", std::move(fit)},
                          {"per_zone", std::move(per_zone)}};
  }
  if (results.saccadic) {
    const SaccadicResults& r = *results.saccadic;
    json events = json::array();
    for (const SaccadicResultEntry& e : r.events) {
      json ej{
          {"event_id", e.event_id},
          {"zone", to_string(e.zone)},
          {"timed_out", e.timed_out},
          {"trace", trace_to_json(e.trace)},
      };
      if (e.reaction_ms) {
        ej["reaction_ms"] = *e.reaction_ms;
      }
      events.push_back(std::move(ej));
    }
    json per_zone = json::object();
    for (const auto& [zone, mean] : r.per_zone_mean_reaction_ms) {
      per_zone[to_string(zone)] = mean;
    }
    doc["saccadic"] = json{{"events", std::move(events)},
                           {"per_zone_mean_reaction_ms", std::move(per_zone)},
                           {"timed_out_count", r.timed_out_count}};
  }
  return jsonio::canonical_dump(doc);
}

ProtocolResults parse_results(const std::string& bytes) {
  json j = jsonio::parse_json(bytes);
  const std::int64_t version = jsonio::as_integer(
      jsonio::member(j, "schema_version", "results"), "schema_version");
  if (version != 1) {
    jsonio::fail("schema_version",
                 "unsupported version " + std::to_string(version));
  }

  ProtocolResults results;
  if (j.contains("static")) {
    const json& sj = j["static"];
    StaticResults r;
    const json& per_point = jsonio::as_array(
        jsonio::member(sj, "per_point", "static"), "static.per_point");
    for (std::size_t i = 0; i < per_point.size(); ++i) {
      const std::string at = "static.per_point[" + std::to_string(i) + "]";
      const json& pj = per_point[i];
      StaticPointResult p;
      p.point_id = jsonio::as_string(jsonio::member(pj, "point_id", at),
                                     at + ".point_id");
      p.zone =
          jsonio::zone_from_json(jsonio::member(pj, "zone", at), at + ".zone");
      p.acquired =
          jsonio::as_bool(jsonio::member(pj, "acquired", at), at + ".acquired");
      if (pj.contains("reaction_ms")) {
        p.reaction_ms =
            jsonio::as_integer(pj["reaction_ms"], at + ".reaction_ms");
      }
      p.stats = stats_from_json(pj, at);
      r.per_point.push_back(std::move(p));
    }
    const json& per_zone = jsonio::member(sj, "per_zone", "static");
    for (const auto& [name, zj] : per_zone.items()) {
      const std::string at = "static.per_zone." + name;
      ScreenZone zone;
      try {
        zone = zone_from_string(name);
      } catch (const std::invalid_argument&) {
        jsonio::fail(at, "unknown screen zone");
      }
      r.per_zone[zone] = stats_from_json(zj, at);
      if (zj.contains("mean_reaction_ms")) {
        r.per_zone_mean_reaction_ms[zone] =
            jsonio::as_number(zj["mean_reaction_ms"], at + ".mean_reaction_ms");
      }
    }
    results.static_gaze = std::move(r);
  }
  if (j.contains("dynamic")) {
    const json& dj = j["dynamic"];
    DynamicResults r;
    r.overall = stats_from_json(jsonio::member(dj, "overall", "dynamic"),
                                "dynamic.overall");
    r.mean_fit = jsonio::as_number(jsonio::member(dj, "mean_fit", "dynamic"),
                                   "dynamic.mean_fit");
    const std::vector<SpeedSample> fit = trace_from_json(
        jsonio::member(dj, "fit_series", "dynamic"), "dynamic.fit_series");
    for (const SpeedSample& s : fit) {
      r.fit_series.push_back(FitSample{s.t_ms, s.speed_deg_per_s});
    }
    const json& per_zone = jsonio::member(dj, "per_zone", "dynamic");
    for (const auto& [name, zj] : per_zone.items()) {
      const std::string at = "dynamic.per_zone." + name;
      ScreenZone zone;
      try {
        zone = zone_from_string(name);
      } catch (const std::invalid_argument&) {
        jsonio::fail(at, "unknown screen zone");
      }
      r.per_zone[zone] = stats_from_json(zj, at);
    }
    results.dynamic_gaze = std::move(r);
  }
  if (j.contains("saccadic")) {
    const json& kj = j["saccadic"];
    SaccadicResults r;
    const json& events = jsonio::as_array(
        jsonio::member(kj, "events", "saccadic"), "saccadic.events");
    for (std::size_t i = 0; i < events.size(); ++i) {
      const std::string at = "saccadic.events[" + std::to_string(i) + "]";
      const json& ej = events[i];
      SaccadicResultEntry e;
      e.event_id = jsonio::as_string(jsonio::member(ej, "event_id", at),
                                     at + ".event_id");
      e.zone =
          jsonio::zone_from_json(jsonio::member(ej, "zone", at), at + ".zone");
      e.timed_out = jsonio::as_bool(jsonio::member(ej, "timed_out", at),
                                    at + ".timed_out");
      if (ej.contains("reaction_ms")) {
        e.reaction_ms =
            jsonio::as_integer(ej["reaction_ms"], at + ".reaction_ms");
      }
      e.trace =
          trace_from_json(jsonio::member(ej, "trace", at), at + ".trace");
      r.events.push_back(std::move(e));
    }
    const json& per_zone =
        jsonio::member(kj, "per_zone_mean_reaction_ms", "saccadic");
    for (const auto& [name, value] : per_zone.items()) {
      const std::string at = "saccadic.per_zone_mean_reaction_ms." + name;
      ScreenZone zone;
      try {
        zone = zone_from_string(name);
      } catch (const std::invalid_argument&) {
        jsonio::fail(at, "unknown screen zone");
      }
      r.per_zone_mean_reaction_ms[zone] = jsonio::as_number(value, at);
    }
    r.timed_out_count = static_cast<int>(jsonio::as_integer(
        jsonio::member(kj, "timed_out_count", "saccadic"),
        "saccadic.timed_out_count"));
    results.saccadic = std::move(r);
  }
  return results;
}

}  // namespace gazekit
