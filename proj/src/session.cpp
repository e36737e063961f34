#include "gazekit/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

const char* to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::StaticGaze: return "static";
    case PhaseKind::DynamicGaze: return "dynamic";
    case PhaseKind::Saccadic: return "saccadic";
  }
  throw std::logic_error("to_string: bad PhaseKind");
}

PhaseKind phase_kind_from_string(const std::string& name) {
  if (name == "static") return PhaseKind::StaticGaze;
  if (name == "dynamic") return PhaseKind::DynamicGaze;
  if (name == "saccadic") return PhaseKind::Saccadic;
  throw std::invalid_argument("unknown phase kind: " + name);
}

const PhaseDescriptor* SessionRecord::find_phase(
    const std::string& phase_id) const {
  for (const PhaseDescriptor& p : phases) {
    if (p.phase_id == phase_id) {
      return &p;
    }
  }
  return nullptr;
}

void validate_session(SessionRecord& record) {
  if (!(record.meta.frame_dt_ms > 0.0)) {
    jsonio::fail("meta.frame_dt_ms", "must be positive");
  }
  if (record.meta.age < 0) {
    jsonio::fail("meta.age", "must be non-negative");
  }

  record.dropouts.clear();
  const double gap_limit = kDropoutToleranceFactor * record.meta.frame_dt_ms;
  for (std::size_t i = 0; i < record.frames.size(); ++i) {
    const GazeFrame& f = record.frames[i];
    const std::string at = "frames[" + std::to_string(i) + "]";
    if (f.t_ms < 0) {
      jsonio::fail(at + ".t_ms", "must be non-negative");
    }
    if (std::abs(f.gaze_local.vec().norm() - 1.0) > 1e-9) {
      jsonio::fail(at + ".gaze_local", "not unit length");
    }
    if (std::abs(f.head.rotation.norm() - 1.0) > 1e-9) {
      jsonio::fail(at + ".head.rotation", "not unit length");
    }
    if (!f.head.position.allFinite()) {
      jsonio::fail(at + ".head.position", "non-finite component");
    }
    if (i > 0) {
      const std::int64_t prev = record.frames[i - 1].t_ms;
      if (f.t_ms <= prev) {
        jsonio::fail(at + ".t_ms",
                     "timestamps must be strictly increasing (first violation "
                     "at index " +
                         std::to_string(i) + ")");
      }
      if (static_cast<double>(f.t_ms - prev) > gap_limit) {
        record.dropouts.push_back(i);
      }
    }
  }

  for (std::size_t i = 0; i < record.phases.size(); ++i) {
    const PhaseDescriptor& p = record.phases[i];
    const std::string at = "phases[" + std::to_string(i) + "]";
    if (p.phase_id.empty()) {
      jsonio::fail(at + ".phase_id", "must be non-empty");
    }
    if (p.start_ms >= p.end_ms) {
      jsonio::fail(at, "start_ms must be less than end_ms");
    }
    if (i > 0 && p.start_ms < record.phases[i - 1].end_ms) {
      jsonio::fail(at, "phases must be ordered and non-overlapping");
    }
  }

  const std::int64_t t_end =
      record.frames.empty() ? 0 : record.frames.back().t_ms;
  std::set<std::string> event_ids;
  for (std::size_t i = 0; i < record.events.size(); ++i) {
    const StimulusEvent& e = record.events[i];
    const std::string at = "events[" + std::to_string(i) + "]";
    if (!event_ids.insert(e.event_id).second) {
      jsonio::fail(at + ".event_id", "duplicate id \"" + e.event_id + "\"");
    }
    if (e.onset_ms < 0 || e.onset_ms > t_end) {
      jsonio::fail(at + ".onset_ms", "outside session time range");
    }
    if (!e.target_position.allFinite()) {
      jsonio::fail(at + ".target_position", "non-finite component");
    }
  }
}

namespace {

GazeFrame frame_from_json(const json& j, const std::string& at) {
  GazeFrame f;
  f.t_ms = jsonio::as_integer(jsonio::member(j, "t_ms", at), at + ".t_ms");
  const json& head = jsonio::member(j, "head", at);
  f.head.position = jsonio::vec3_from_json(
      jsonio::member(head, "position", at + ".head"), at + ".head.position");
  f.head.rotation = jsonio::quat_from_json(
      jsonio::member(head, "rotation", at + ".head"), at + ".head.rotation");
  f.gaze_local = jsonio::unit_dir_from_json(
      jsonio::member(j, "gaze_local", at), at + ".gaze_local");
  f.left_open =
      jsonio::as_bool(jsonio::member(j, "left_open", at), at + ".left_open");
  f.right_open =
      jsonio::as_bool(jsonio::member(j, "right_open", at), at + ".right_open");
  return f;
}

json frame_to_json(const GazeFrame& f) {
  return json{
      {"t_ms", f.t_ms},
      {"head",
       {{"position", jsonio::vec3_to_json(f.head.position)},
        {"rotation", jsonio::quat_to_json(f.head.rotation)}}},
      {"gaze_local", jsonio::vec3_to_json(f.gaze_local.vec())},
      {"left_open", f.left_open},
      {"right_open", f.right_open},
  };
}

StimulusEvent event_from_json(const json& j, const std::string& at) {
  StimulusEvent e;
  e.event_id =
      jsonio::as_string(jsonio::member(j, "event_id", at), at + ".event_id");
  e.onset_ms =
      jsonio::as_integer(jsonio::member(j, "onset_ms", at), at + ".onset_ms");
  e.target_position = jsonio::vec3_from_json(
      jsonio::member(j, "target_position", at), at + ".target_position");
  e.zone = jsonio::zone_from_json(jsonio::member(j, "zone", at), at + ".zone");
  return e;
}

json event_to_json(const StimulusEvent& e) {
  return json{
      {"event_id", e.event_id},
      {"onset_ms", e.onset_ms},
      {"target_position", jsonio::vec3_to_json(e.target_position)},
      {"zone", to_string(e.zone)},
  };
}

PhaseDescriptor phase_from_json(const json& j, const std::string& at) {
  PhaseDescriptor p;
  p.phase_id =
      jsonio::as_string(jsonio::member(j, "phase_id", at), at + ".phase_id");
  const std::string kind =
      jsonio::as_string(jsonio::member(j, "kind", at), at + ".kind");
  try {
    p.kind = phase_kind_from_string(kind);
  } catch (const std::invalid_argument&) {
    jsonio::fail(at + ".kind", "unknown phase kind \"" + kind + "\"");
  }
  p.start_ms =
      jsonio::as_integer(jsonio::member(j, "start_ms", at), at + ".start_ms");
  p.end_ms = jsonio::as_integer(jsonio::member(j, "end_ms", at), at + ".end_ms");
  return p;
}

json phase_to_json(const PhaseDescriptor& p) {
  return json{
      {"phase_id", p.phase_id},
      {"kind", to_string(p.kind)},
      {"start_ms", p.start_ms},
      {"end_ms", p.end_ms},
  };
}

SessionRecord parse_session_impl(const json& j) {
  if (!j.is_object()) {
    jsonio::fail("session", "top level must be an object");
  }
  const std::int64_t version = jsonio::as_integer(
      jsonio::member(j, "schema_version", "session"), "schema_version");
  if (version != 1) {
    jsonio::fail("schema_version",
                 "unsupported version " + std::to_string(version));
  }

  SessionRecord record;
  const json& meta = jsonio::member(j, "meta", "session");
  record.meta.name =
      jsonio::as_string(jsonio::member(meta, "name", "meta"), "meta.name");
  record.meta.age = static_cast<int>(
      jsonio::as_integer(jsonio::member(meta, "age", "meta"), "meta.age"));
  record.meta.gender =
      jsonio::as_string(jsonio::member(meta, "gender", "meta"), "meta.gender");
  record.meta.device =
      jsonio::as_string(jsonio::member(meta, "device", "meta"), "meta.device");
  record.meta.frame_dt_ms = jsonio::as_number(
      jsonio::member(meta, "frame_dt_ms", "meta"), "meta.frame_dt_ms");
  if (meta.contains("seed")) {
    record.meta.seed = jsonio::as_integer(meta["seed"], "meta.seed");
  }

  const json& frames = jsonio::as_array(
      jsonio::member(j, "frames", "session"), "frames");
  record.frames.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    record.frames.push_back(
        frame_from_json(frames[i], "frames[" + std::to_string(i) + "]"));
  }

  const json& phases = jsonio::as_array(
      jsonio::member(j, "phases", "session"), "phases");
  for (std::size_t i = 0; i < phases.size(); ++i) {
    record.phases.push_back(
        phase_from_json(phases[i], "phases[" + std::to_string(i) + "]"));
  }

  const json& events = jsonio::as_array(
      jsonio::member(j, "events", "session"), "events");
  for (std::size_t i = 0; i < events.size(); ++i) {
    record.events.push_back(
        event_from_json(events[i], "events[" + std::to_string(i) + "]"));
  }

  validate_session(record);
  return record;
}

}  // namespace

SessionRecord parse_session(const std::string& bytes) {
  const json j = jsonio::parse_json(bytes);
  try {
    return parse_session_impl(j);
  } catch (const json::exception& e) {
    // Validation is total: any stray library exception is a diagnostic.
    throw ValidationError(std::string("session: ") + e.what());
  }
}

std::string serialize_session(const SessionRecord& record) {
  SessionRecord checked = record;
  validate_session(checked);

  json meta{
      {"name", record.meta.name},
      {"age", record.meta.age},
      {"gender", record.meta.gender},
      {"device", record.meta.device},
      {"frame_dt_ms", record.meta.frame_dt_ms},
  };
  if (record.meta.seed) {
    meta["seed"] = *record.meta.seed;
  }

  json frames = json::array();
  for (const GazeFrame& f : record.frames) {
    frames.push_back(frame_to_json(f));
  }
  json phases = json::array();
  for (const PhaseDescriptor& p : record.phases) {
    phases.push_back(phase_to_json(p));
  }
  json events = json::array();
  for (const StimulusEvent& e : record.events) {
    events.push_back(event_to_json(e));
  }

  const json doc{
      {"schema_version", 1},
      {"meta", std::move(meta)},
      {"frames", std::move(frames)},
      {"phases", std::move(phases)},
      {"events", std::move(events)},
  };
  return jsonio::canonical_dump(doc);
}

std::vector<GazeFrame> slice_phase(const SessionRecord& record,
                                   const std::string& phase_id) {
  const PhaseDescriptor* phase = record.find_phase(phase_id);
  if (phase == nullptr) {
    throw ValidationError("phase not found: \"" + phase_id + "\"");
  }
  std::vector<GazeFrame> out;
  for (const GazeFrame& f : record.frames) {
    if (f.t_ms >= phase->start_ms && f.t_ms < phase->end_ms) {
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace gazekit
