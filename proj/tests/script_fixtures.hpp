#pragma once

// Script builders shared by the simulator, report, CLI, and acceptance tests.

#include <cstdint>
#include <string>
#include <vector>

#include "gazekit/script.hpp"

namespace gazekit::testfix {

inline Vec3 zone_center(ScreenZone zone, const VirtualScreen& screen = {}) {
  double u = 0.5, v = 0.5;
  switch (zone) {
    case ScreenZone::Left: u = 1.0 / 6.0; break;
    case ScreenZone::Right: u = 5.0 / 6.0; break;
    case ScreenZone::Center: break;
    case ScreenZone::TopLeft: u = 1.0 / 6.0; v = 5.0 / 6.0; break;
    case ScreenZone::TopRight: u = 5.0 / 6.0; v = 5.0 / 6.0; break;
    case ScreenZone::Top: v = 5.0 / 6.0; break;
    case ScreenZone::BottomLeft: u = 1.0 / 6.0; v = 1.0 / 6.0; break;
    case ScreenZone::BottomRight: u = 5.0 / 6.0; v = 1.0 / 6.0; break;
    case ScreenZone::Bottom: v = 1.0 / 6.0; break;
  }
  return Vec3((2.0 * u - 1.0) * screen.half_width,
              (2.0 * v - 1.0) * screen.half_height, screen.distance);
}

/// One fixation point per zone, presented back to back.
inline ScriptPhase calibration_phase(std::int64_t start_ms = 0,
                                     std::int64_t hold_ms = 1400,
                                     double radius = 0.05) {
  ScriptPhase phase;
  phase.phase_id = "calibration";
  phase.kind = PhaseKind::StaticGaze;
  phase.start_ms = start_ms;
  phase.end_ms = start_ms + 9 * hold_ms;
  StaticGazeConfig cfg;
  std::int64_t onset = start_ms;
  for (const ScreenZone zone : kAllZones) {
    cfg.points.push_back(StaticPoint{std::string("pt_") + to_string(zone),
                                     zone_center(zone), radius, onset, hold_ms,
                                     zone});
    onset += hold_ms;
  }
  phase.config = cfg;
  return phase;
}

/// Line plus bezier pursuit inside the field of view.
inline ScriptPhase pursuit_phase(std::int64_t start_ms, std::int64_t end_ms,
                                 double speed = 0.4, double radius = 0.06) {
  ScriptPhase phase;
  phase.phase_id = "pursuit";
  phase.kind = PhaseKind::DynamicGaze;
  phase.start_ms = start_ms;
  phase.end_ms = end_ms;
  DynamicGazeConfig cfg;
  cfg.path.segments.push_back(
      LineSegment{Vec3(-0.3, -0.15, 1.0), Vec3(0.3, -0.15, 1.0)});
  // Cusp-free U-turn: the derivative never vanishes, so the target speed
  // along the curve stays well defined everywhere.
  CubicBezierSegment bez;
  bez.p0 = Vec3(0.3, -0.15, 1.0);
  bez.c0 = Vec3(0.55, -0.15, 1.0);
  bez.c1 = Vec3(0.55, 0.15, 1.0);
  bez.p1 = Vec3(0.3, 0.15, 1.0);
  cfg.path.segments.push_back(bez);
  cfg.target_speed = speed;
  cfg.radius = radius;
  phase.config = cfg;
  return phase;
}

/// Stimuli alternating across zones, spaced far enough apart that windows
/// never overlap.
inline ScriptPhase saccade_phase(std::int64_t start_ms, int stimulus_count,
                                 std::int64_t gap_ms = 1200,
                                 std::int64_t timeout_ms = 1000,
                                 double radius = 0.06) {
  ScriptPhase phase;
  phase.phase_id = "saccade";
  phase.kind = PhaseKind::Saccadic;
  phase.start_ms = start_ms;
  SaccadicConfig cfg;
  cfg.timeout_ms = timeout_ms;
  cfg.radius = radius;
  const ScreenZone cycle[8] = {
      ScreenZone::Left,    ScreenZone::TopRight, ScreenZone::Bottom,
      ScreenZone::Right,   ScreenZone::TopLeft,  ScreenZone::BottomRight,
      ScreenZone::Top,     ScreenZone::BottomLeft,
  };
  std::int64_t onset = start_ms + 200;
  for (int i = 0; i < stimulus_count; ++i) {
    const ScreenZone zone = cycle[i % 8];
    cfg.stimuli.push_back(SaccadicStimulus{"s" + std::to_string(i + 1), onset,
                                           zone_center(zone), zone, {}});
    onset += gap_ms;
  }
  phase.end_ms = onset - gap_ms + timeout_ms + 100;
  phase.config = cfg;
  return phase;
}

/// The full three-protocol battery used by the closed-loop tests.
inline TestScript full_battery(int stimulus_count = 8) {
  TestScript script;
  script.phases.push_back(calibration_phase(0));
  script.phases.push_back(pursuit_phase(13000, 23000));
  script.phases.push_back(saccade_phase(24000, stimulus_count));
  script.validate();
  return script;
}

}  // namespace gazekit::testfix
