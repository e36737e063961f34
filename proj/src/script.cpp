#include "gazekit/script.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

const ScriptPhase* TestScript::find_phase(const std::string& phase_id) const {
  for (const ScriptPhase& p : phases) {
    if (p.phase_id == phase_id) {
      return &p;
    }
  }
  return nullptr;
}

std::int64_t TestScript::end_ms() const {
  return phases.empty() ? 0 : phases.back().end_ms;
}

void TestScript::validate() const {
  if (phases.empty()) {
    throw ConfigError("script has no phases");
  }
  if (!(screen.distance > 0.0 && screen.half_width > 0.0 &&
        screen.half_height > 0.0)) {
    throw ConfigError("screen dimensions must be positive");
  }
  std::set<std::string> ids;
  std::set<PhaseKind> kinds;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const ScriptPhase& p = phases[i];
    const std::string where = "phase \"" + p.phase_id + "\"";
    if (!ids.insert(p.phase_id).second) {
      throw ConfigError("duplicate phase id \"" + p.phase_id + "\"");
    }
    if (!kinds.insert(p.kind).second) {
      throw ConfigError("more than one phase of kind " +
                        std::string(to_string(p.kind)));
    }
    if (p.start_ms >= p.end_ms) {
      throw ConfigError(where + ": start_ms must be less than end_ms");
    }
    if (i > 0 && p.start_ms < phases[i - 1].end_ms) {
      throw ConfigError(where + ": phases must be ordered and non-overlapping");
    }

    if (const auto* cfg = std::get_if<StaticGazeConfig>(&p.config)) {
      if (p.kind != PhaseKind::StaticGaze) {
        throw ConfigError(where + ": config kind mismatch");
      }
      if (cfg->points.empty()) {
        throw ConfigError(where + ": static config has no points");
      }
      std::map<ScreenZone, int> zone_counts;
      std::set<std::string> point_ids;
      std::int64_t prev_end = p.start_ms;
      std::set<std::string> distractor_ids;
      std::int64_t prev_onset = p.start_ms;
      for (const DistractorEvent& d : cfg->distractors) {
        if (!distractor_ids.insert(d.event_id).second) {
          throw ConfigError(where + ": duplicate distractor id \"" +
                            d.event_id + "\"");
        }
        if (d.onset_ms < prev_onset || d.onset_ms >= p.end_ms) {
          throw ConfigError(where + ": distractor \"" + d.event_id +
                            "\" onset outside the phase or out of order");
        }
        prev_onset = d.onset_ms;
      }
      for (const StaticPoint& pt : cfg->points) {
        if (!point_ids.insert(pt.point_id).second) {
          throw ConfigError(where + ": duplicate point id \"" + pt.point_id +
                            "\"");
        }
        if (!(pt.radius > 0.0)) {
          throw ConfigError(where + ": point \"" + pt.point_id +
                            "\" radius must be positive");
        }
        if (pt.hold_ms <= 0) {
          throw ConfigError(where + ": point \"" + pt.point_id +
                            "\" has a zero-length window");
        }
        if (pt.onset_ms < prev_end) {
          throw ConfigError(where + ": point windows must be sequential");
        }
        prev_end = pt.onset_ms + pt.hold_ms;
        if (prev_end > p.end_ms) {
          throw ConfigError(where + ": point \"" + pt.point_id +
                            "\" window extends past phase end");
        }
        if (++zone_counts[pt.zone] > cfg->max_points_per_zone) {
          throw ConfigError(where + ": too many points in zone " +
                            std::string(to_string(pt.zone)));
        }
      }
    } else if (const auto* cfg = std::get_if<DynamicGazeConfig>(&p.config)) {
      if (p.kind != PhaseKind::DynamicGaze) {
        throw ConfigError(where + ": config kind mismatch");
      }
      if (!(cfg->target_speed > 0.0)) {
        throw ConfigError(where + ": target_speed must be positive");
      }
      if (!(cfg->radius > 0.0)) {
        throw ConfigError(where + ": radius must be positive");
      }
      cfg->path.validate();
      const ArcLengthTable table = build_arc_length_table(cfg->path);
      const double travel_s = table.total_length / cfg->target_speed;
      const double phase_s =
          static_cast<double>(p.end_ms - p.start_ms) / 1000.0;
      if (travel_s > phase_s) {
        throw ConfigError(where + ": path travel time exceeds phase duration");
      }
    } else {
      const auto& sac = std::get<SaccadicConfig>(p.config);
      if (p.kind != PhaseKind::Saccadic) {
        throw ConfigError(where + ": config kind mismatch");
      }
      if (sac.stimuli.empty()) {
        throw ConfigError(where + ": saccadic config has no stimuli");
      }
      if (sac.timeout_ms <= 0) {
        throw ConfigError(where + ": timeout_ms must be positive");
      }
      if (!(sac.radius > 0.0)) {
        throw ConfigError(where + ": radius must be positive");
      }
      std::set<std::string> event_ids;
      for (std::size_t k = 0; k < sac.stimuli.size(); ++k) {
        const SaccadicStimulus& s = sac.stimuli[k];
        if (!event_ids.insert(s.event_id).second) {
          throw ConfigError(where + ": duplicate stimulus id \"" + s.event_id +
                            "\"");
        }
        if (sac.timeout_for(s) <= 0) {
          throw ConfigError(where + ": stimulus \"" + s.event_id +
                            "\" timeout must be positive");
        }
        if (s.onset_ms < p.start_ms ||
            s.onset_ms + sac.timeout_for(s) > p.end_ms) {
          throw ConfigError(where + ": stimulus \"" + s.event_id +
                            "\" window falls outside the phase");
        }
        if (k > 0) {
          const SaccadicStimulus& prev = sac.stimuli[k - 1];
          if (s.onset_ms <= prev.onset_ms + sac.timeout_for(prev)) {
            throw ConfigError(where + ": stimulus windows overlap at \"" +
                              s.event_id + "\"");
          }
        }
      }
    }
  }
}

namespace {

json segment_to_json(const PathSegment& seg) {
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    return json{{"kind", "line"},
                {"p0", jsonio::vec3_to_json(line->p0)},
                {"p1", jsonio::vec3_to_json(line->p1)}};
  }
  const auto& bez = std::get<CubicBezierSegment>(seg);
  return json{{"kind", "cubic_bezier"},
              {"p0", jsonio::vec3_to_json(bez.p0)},
              {"c0", jsonio::vec3_to_json(bez.c0)},
              {"c1", jsonio::vec3_to_json(bez.c1)},
              {"p1", jsonio::vec3_to_json(bez.p1)}};
}

PathSegment segment_from_json(const json& j, const std::string& at) {
  const std::string kind =
      jsonio::as_string(jsonio::member(j, "kind", at), at + ".kind");
  if (kind == "line") {
    LineSegment line;
    line.p0 = jsonio::vec3_from_json(jsonio::member(j, "p0", at), at + ".p0");
    line.p1 = jsonio::vec3_from_json(jsonio::member(j, "p1", at), at + ".p1");
    return line;
  }
  if (kind == "cubic_bezier") {
    CubicBezierSegment bez;
    bez.p0 = jsonio::vec3_from_json(jsonio::member(j, "p0", at), at + ".p0");
    bez.c0 = jsonio::vec3_from_json(jsonio::member(j, "c0", at), at + ".c0");
    bez.c1 = jsonio::vec3_from_json(jsonio::member(j, "c1", at), at + ".c1");
    bez.p1 = jsonio::vec3_from_json(jsonio::member(j, "p1", at), at + ".p1");
    return bez;
  }
  jsonio::fail(at + ".kind", "unknown segment kind \"" + kind + "\"");
}

json path_to_json(const Path& path) {
  json segments = json::array();
  for (const PathSegment& seg : path.segments) {
    segments.push_back(segment_to_json(seg));
  }
  return json{{"segments", std::move(segments)}};
}

Path path_from_json(const json& j, const std::string& at) {
  Path path;
  const json& segments = jsonio::as_array(
      jsonio::member(j, "segments", at), at + ".segments");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    path.segments.push_back(segment_from_json(
        segments[i], at + ".segments[" + std::to_string(i) + "]"));
  }
  return path;
}

json phase_config_to_json(const ScriptPhase& phase) {
  if (const auto* cfg = std::get_if<StaticGazeConfig>(&phase.config)) {
    json points = json::array();
    for (const StaticPoint& pt : cfg->points) {
      points.push_back(json{
          {"point_id", pt.point_id},
          {"position", jsonio::vec3_to_json(pt.position)},
          {"radius", pt.radius},
          {"onset_ms", pt.onset_ms},
          {"hold_ms", pt.hold_ms},
          {"zone", to_string(pt.zone)},
      });
    }
    json out{{"points", std::move(points)},
             {"max_points_per_zone", cfg->max_points_per_zone}};
    if (!cfg->distractors.empty()) {
      json distractors = json::array();
      for (const DistractorEvent& d : cfg->distractors) {
        distractors.push_back(json{
            {"event_id", d.event_id},
            {"onset_ms", d.onset_ms},
            {"position", jsonio::vec3_to_json(d.position)},
            {"zone", to_string(d.zone)},
        });
      }
      out["distractors"] = std::move(distractors);
    }
    return out;
  }
  if (const auto* cfg = std::get_if<DynamicGazeConfig>(&phase.config)) {
    return json{{"path", path_to_json(cfg->path)},
                {"target_speed", cfg->target_speed},
                {"radius", cfg->radius}};
  }
  const auto& cfg = std::get<SaccadicConfig>(phase.config);
  json stimuli = json::array();
  for (const SaccadicStimulus& s : cfg.stimuli) {
    json entry{
        {"event_id", s.event_id},
        {"onset_ms", s.onset_ms},
        {"target_position", jsonio::vec3_to_json(s.target_position)},
        {"zone", to_string(s.zone)},
    };
    if (s.timeout_ms) {
      entry["timeout_ms"] = *s.timeout_ms;
    }
    stimuli.push_back(std::move(entry));
  }
  return json{{"stimuli", std::move(stimuli)},
              {"timeout_ms", cfg.timeout_ms},
              {"radius", cfg.radius}};
}

PhaseConfig phase_config_from_json(const json& j, PhaseKind kind,
                                   const std::string& at) {
  if (kind == PhaseKind::StaticGaze) {
    const json& cj = jsonio::member(j, "static", at);
    StaticGazeConfig cfg;
    const json& points = jsonio::as_array(
        jsonio::member(cj, "points", at + ".static"), at + ".static.points");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string pat = at + ".static.points[" + std::to_string(i) + "]";
      const json& pj = points[i];
      StaticPoint pt;
      pt.point_id = jsonio::as_string(jsonio::member(pj, "point_id", pat),
                                      pat + ".point_id");
      pt.position = jsonio::vec3_from_json(jsonio::member(pj, "position", pat),
                                           pat + ".position");
      pt.radius =
          jsonio::as_number(jsonio::member(pj, "radius", pat), pat + ".radius");
      pt.onset_ms = jsonio::as_integer(jsonio::member(pj, "onset_ms", pat),
                                       pat + ".onset_ms");
      pt.hold_ms = jsonio::as_integer(jsonio::member(pj, "hold_ms", pat),
                                      pat + ".hold_ms");
      pt.zone = jsonio::zone_from_json(jsonio::member(pj, "zone", pat),
                                       pat + ".zone");
      cfg.points.push_back(std::move(pt));
    }
    if (cj.contains("max_points_per_zone")) {
      cfg.max_points_per_zone = static_cast<int>(jsonio::as_integer(
          cj["max_points_per_zone"], at + ".static.max_points_per_zone"));
    }
    if (cj.contains("distractors")) {
      const json& distractors =
          jsonio::as_array(cj["distractors"], at + ".static.distractors");
      for (std::size_t i = 0; i < distractors.size(); ++i) {
        const std::string dat =
            at + ".static.distractors[" + std::to_string(i) + "]";
        const json& dj = distractors[i];
        DistractorEvent d;
        d.event_id = jsonio::as_string(jsonio::member(dj, "event_id", dat),
                                       dat + ".event_id");
        d.onset_ms = jsonio::as_integer(jsonio::member(dj, "onset_ms", dat),
                                        dat + ".onset_ms");
        d.position = jsonio::vec3_from_json(
            jsonio::member(dj, "position", dat), dat + ".position");
        d.zone = jsonio::zone_from_json(jsonio::member(dj, "zone", dat),
                                        dat + ".zone");
        cfg.distractors.push_back(std::move(d));
      }
    }
    return cfg;
  }
  if (kind == PhaseKind::DynamicGaze) {
    const json& cj = jsonio::member(j, "dynamic", at);
    DynamicGazeConfig cfg;
    cfg.path = path_from_json(jsonio::member(cj, "path", at + ".dynamic"),
                              at + ".dynamic.path");
    cfg.target_speed =
        jsonio::as_number(jsonio::member(cj, "target_speed", at + ".dynamic"),
                          at + ".dynamic.target_speed");
    cfg.radius = jsonio::as_number(
        jsonio::member(cj, "radius", at + ".dynamic"), at + ".dynamic.radius");
    return cfg;
  }
  const json& cj = jsonio::member(j, "saccadic", at);
  SaccadicConfig cfg;
  const json& stimuli = jsonio::as_array(
      jsonio::member(cj, "stimuli", at + ".saccadic"), at + ".saccadic.stimuli");
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    const std::string sat = at + ".saccadic.stimuli[" + std::to_string(i) + "]";
    const json& sj = stimuli[i];
    SaccadicStimulus s;
    s.event_id = jsonio::as_string(jsonio::member(sj, "event_id", sat),
                                   sat + ".event_id");
    s.onset_ms = jsonio::as_integer(jsonio::member(sj, "onset_ms", sat),
                                    sat + ".onset_ms");
    s.target_position = jsonio::vec3_from_json(
        jsonio::member(sj, "target_position", sat), sat + ".target_position");
    s.zone =
        jsonio::zone_from_json(jsonio::member(sj, "zone", sat), sat + ".zone");
    if (sj.contains("timeout_ms")) {
      s.timeout_ms = jsonio::as_integer(sj["timeout_ms"], sat + ".timeout_ms");
    }
    cfg.stimuli.push_back(std::move(s));
  }
  cfg.timeout_ms =
      jsonio::as_integer(jsonio::member(cj, "timeout_ms", at + ".saccadic"),
                         at + ".saccadic.timeout_ms");
  cfg.radius = jsonio::as_number(
      jsonio::member(cj, "radius", at + ".saccadic"), at + ".saccadic.radius");
  return cfg;
}

json analysis_to_json(const AnalysisConfig& a) {
  return json{
      {"fit_cap_deg", a.fit_cap_deg},
      {"min_offset_run_frames", a.min_offset_run_frames},
      {"saccade_threshold_deg_s", a.saccade_threshold_deg_s},
      {"saccade_min_run", a.saccade_min_run},
      {"srt_mode", a.srt_mode == SrtMode::FirstHit ? "first_hit"
                                                   : "velocity_onset"},
      {"weight_static", a.weight_static},
      {"weight_dynamic", a.weight_dynamic},
      {"weight_saccadic", a.weight_saccadic},
      {"rt_full_marks_ms", a.rt_full_marks_ms},
      {"rt_zero_ms", a.rt_zero_ms},
      {"grade_excellent", a.grade_excellent},
      {"grade_good", a.grade_good},
      {"grade_fair", a.grade_fair},
  };
}

AnalysisConfig analysis_from_json(const json& j) {
  AnalysisConfig a;
  const auto num = [&](const char* key, double fallback) {
    return j.contains(key)
               ? jsonio::as_number(j[key], std::string("analysis.") + key)
               : fallback;
  };
  const auto integer = [&](const char* key, int fallback) {
    return j.contains(key)
               ? static_cast<int>(jsonio::as_integer(
                     j[key], std::string("analysis.") + key))
               : fallback;
  };
  a.fit_cap_deg = num("fit_cap_deg", a.fit_cap_deg);
  a.min_offset_run_frames =
      integer("min_offset_run_frames", a.min_offset_run_frames);
  a.saccade_threshold_deg_s =
      num("saccade_threshold_deg_s", a.saccade_threshold_deg_s);
  a.saccade_min_run = integer("saccade_min_run", a.saccade_min_run);
  if (j.contains("srt_mode")) {
    const std::string mode = jsonio::as_string(j["srt_mode"], "analysis.srt_mode");
    if (mode == "first_hit") {
      a.srt_mode = SrtMode::FirstHit;
    } else if (mode == "velocity_onset") {
      a.srt_mode = SrtMode::VelocityOnset;
    } else {
      jsonio::fail("analysis.srt_mode", "unknown mode \"" + mode + "\"");
    }
  }
  a.weight_static = num("weight_static", a.weight_static);
  a.weight_dynamic = num("weight_dynamic", a.weight_dynamic);
  a.weight_saccadic = num("weight_saccadic", a.weight_saccadic);
  a.rt_full_marks_ms = num("rt_full_marks_ms", a.rt_full_marks_ms);
  a.rt_zero_ms = num("rt_zero_ms", a.rt_zero_ms);
  a.grade_excellent = num("grade_excellent", a.grade_excellent);
  a.grade_good = num("grade_good", a.grade_good);
  a.grade_fair = num("grade_fair", a.grade_fair);
  return a;
}

}  // namespace

TestScript parse_script(const std::string& bytes) {
  json j = jsonio::parse_json(bytes);
  const std::int64_t version = jsonio::as_integer(
      jsonio::member(j, "schema_version", "script"), "schema_version");
  if (version != 1) {
    jsonio::fail("schema_version",
                 "unsupported version " + std::to_string(version));
  }

  TestScript script;
  if (j.contains("screen")) {
    const json& s = j["screen"];
    script.screen.distance =
        jsonio::as_number(jsonio::member(s, "distance", "screen"),
                          "screen.distance");
    script.screen.half_width = jsonio::as_number(
        jsonio::member(s, "half_width", "screen"), "screen.half_width");
    script.screen.half_height = jsonio::as_number(
        jsonio::member(s, "half_height", "screen"), "screen.half_height");
  }
  if (j.contains("analysis")) {
    script.analysis = analysis_from_json(j["analysis"]);
  }

  const json& phases = jsonio::as_array(
      jsonio::member(j, "phases", "script"), "phases");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const std::string at = "phases[" + std::to_string(i) + "]";
    const json& pj = phases[i];
    ScriptPhase phase;
    phase.phase_id = jsonio::as_string(jsonio::member(pj, "phase_id", at),
                                       at + ".phase_id");
    const std::string kind =
        jsonio::as_string(jsonio::member(pj, "kind", at), at + ".kind");
    try {
      phase.kind = phase_kind_from_string(kind);
    } catch (const std::invalid_argument&) {
      jsonio::fail(at + ".kind", "unknown phase kind \"" + kind + "\"");
    }
    phase.start_ms = jsonio::as_integer(jsonio::member(pj, "start_ms", at),
                                        at + ".start_ms");
    phase.end_ms =
        jsonio::as_integer(jsonio::member(pj, "end_ms", at), at + ".end_ms");
    phase.config = phase_config_from_json(pj, phase.kind, at);
    script.phases.push_back(std::move(phase));
  }

  try {
    script.validate();
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  return script;
}

std::string serialize_script(const TestScript& script) {
  script.validate();
  json phases = json::array();
  for (const ScriptPhase& phase : script.phases) {
    json pj{
        {"phase_id", phase.phase_id},
        {"kind", to_string(phase.kind)},
        {"start_ms", phase.start_ms},
        {"end_ms", phase.end_ms},
    };
    const char* key = phase.kind == PhaseKind::StaticGaze  ? "static"
                      : phase.kind == PhaseKind::DynamicGaze ? "dynamic"
                                                             : "saccadic";
    pj[key] = phase_config_to_json(phase);
    phases.push_back(std::move(pj));
  }
  const json doc{
      {"schema_version", 1},
      {"screen",
       {{"distance", script.screen.distance},
        {"half_width", script.screen.half_width},
        {"half_height", script.screen.half_height}}},
      {"analysis", analysis_to_json(script.analysis)},
      {"phases", std::move(phases)},
  };
  return jsonio::canonical_dump(doc);
}

Vec3 dynamic_target_position(const DynamicGazeConfig& cfg,
                             const ArcLengthTable& table,
                             std::int64_t phase_start_ms, std::int64_t t_ms) {
  const double elapsed_s =
      static_cast<double>(std::max<std::int64_t>(t_ms - phase_start_ms, 0)) /
      1000.0;
  const double s =
      std::min(cfg.target_speed * elapsed_s, table.total_length);
  return position_at_distance(cfg.path, table, s);
}

}  // namespace gazekit
