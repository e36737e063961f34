#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazekit/geometry.hpp"

namespace gazekit {

/// One eye-tracking sample, nominally every 14 ms.
struct GazeFrame {
  std::int64_t t_ms = 0;
  HeadPose head;
  UnitDir gaze_local{0.0, 0.0, 1.0};  // head-local combined gaze direction
  bool left_open = true;
  bool right_open = true;

  bool eyes_closed() const { return !left_open && !right_open; }
};

struct StimulusEvent {
  std::string event_id;
  std::int64_t onset_ms = 0;
  Vec3 target_position{Vec3::Zero()};
  ScreenZone zone = ScreenZone::Center;
};

enum class PhaseKind { StaticGaze, DynamicGaze, Saccadic };

const char* to_string(PhaseKind kind);
PhaseKind phase_kind_from_string(const std::string& name);

struct PhaseDescriptor {
  std::string phase_id;
  PhaseKind kind = PhaseKind::StaticGaze;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

struct SessionMeta {
  std::string name;
  int age = 0;
  std::string gender;
  std::string device;
  double frame_dt_ms = 14.0;
  std::optional<std::int64_t> seed;  // present iff the session was simulated
};

/// A whole recorded (or simulated) session: metadata, the frame stream,
/// the phase layout, and the stimulus events that were presented.
/// Immutable after parse; this is the JSON interchange unit.
struct SessionRecord {
  SessionMeta meta;
  std::vector<GazeFrame> frames;
  std::vector<PhaseDescriptor> phases;
  std::vector<StimulusEvent> events;

  /// Indices of frames preceded by a gap above 3x frame_dt_ms.
  /// Derived during validation; not serialized.
  std::vector<std::size_t> dropouts;

  const PhaseDescriptor* find_phase(const std::string& phase_id) const;
};

/// Multiple of frame_dt_ms beyond which a gap counts as a dropout.
inline constexpr double kDropoutToleranceFactor = 3.0;

/// Validates invariants in place (renormalizing directions is done at parse
/// time; here norms must already hold) and recomputes dropout flags.
/// Throws ValidationError naming the offending field.
void validate_session(SessionRecord& record);

/// Parses and validates a session from UTF-8 JSON bytes. Malformed JSON is
/// reported with its byte offset; schema violations name the field.
SessionRecord parse_session(const std::string& bytes);

/// Canonical serialization: sorted keys, shortest round-trip reals,
/// newline-terminated. parse(serialize(r)) is structurally equal to r and
/// serialize(parse(b)) == b for canonical b.
std::string serialize_session(const SessionRecord& record);

/// Frames with phase.start_ms <= t_ms < phase.end_ms, in stream order.
std::vector<GazeFrame> slice_phase(const SessionRecord& record,
                                   const std::string& phase_id);

}  // namespace gazekit
