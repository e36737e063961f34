#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gazekit/geometry.hpp"
#include "gazekit/path.hpp"
#include "gazekit/session.hpp"

namespace gazekit {

/// One fixation target of the static test. The presentation window is
/// [onset_ms, onset_ms + hold_ms) in absolute session time.
struct StaticPoint {
  std::string point_id;
  Vec3 position{Vec3::Zero()};
  double radius = 0.05;
  std::int64_t onset_ms = 0;
  std::int64_t hold_ms = 0;
  ScreenZone zone = ScreenZone::Center;
};

/// A distractor shown during a static hold. Recorded for disturbance-style
/// scripts; the analyzers do not treat it as a gaze target.
struct DistractorEvent {
  std::string event_id;
  std::int64_t onset_ms = 0;
  Vec3 position{Vec3::Zero()};
  ScreenZone zone = ScreenZone::Center;
};

struct StaticGazeConfig {
  std::vector<StaticPoint> points;  // presentation order
  std::vector<DistractorEvent> distractors;
  int max_points_per_zone = 8;
};

struct DynamicGazeConfig {
  Path path;
  double target_speed = 0.0;  // meters/second
  double radius = 0.05;       // gaze-on tolerance sphere around the target
};

struct SaccadicStimulus {
  std::string event_id;
  std::int64_t onset_ms = 0;
  Vec3 target_position{Vec3::Zero()};
  ScreenZone zone = ScreenZone::Center;
  std::optional<std::int64_t> timeout_ms;  // overrides the config default
};

struct SaccadicConfig {
  std::vector<SaccadicStimulus> stimuli;  // ordered by onset
  std::int64_t timeout_ms = 1000;
  double radius = 0.05;

  std::int64_t timeout_for(const SaccadicStimulus& s) const {
    return s.timeout_ms.value_or(timeout_ms);
  }
};

using PhaseConfig =
    std::variant<StaticGazeConfig, DynamicGazeConfig, SaccadicConfig>;

struct ScriptPhase {
  std::string phase_id;
  PhaseKind kind = PhaseKind::StaticGaze;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  PhaseConfig config;

  PhaseDescriptor descriptor() const {
    return PhaseDescriptor{phase_id, kind, start_ms, end_ms};
  }
};

/// How saccadic reaction time is measured: from stimulus onset to the first
/// target hit (default), or to the first above-threshold velocity sample on
/// the way there.
enum class SrtMode { FirstHit, VelocityOnset };

/// Tunable analysis knobs with fixed defaults; overridable per script.
struct AnalysisConfig {
  double fit_cap_deg = 10.0;          // pursuit fit saturates at this error
  int min_offset_run_frames = 1;      // debounce: shorter off runs ignored
  double saccade_threshold_deg_s = 100.0;
  int saccade_min_run = 2;
  SrtMode srt_mode = SrtMode::FirstHit;
  double weight_static = 0.4;
  double weight_dynamic = 0.4;
  double weight_saccadic = 0.2;
  double rt_full_marks_ms = 150.0;    // mean reaction time worth 100
  double rt_zero_ms = 600.0;          // mean reaction time worth 0
  double grade_excellent = 85.0;
  double grade_good = 70.0;
  double grade_fair = 50.0;
};

/// Declarative description of a whole test run: screen model, phases with
/// their protocol configs, and analysis parameters.
struct TestScript {
  VirtualScreen screen;
  std::vector<ScriptPhase> phases;
  AnalysisConfig analysis;

  const ScriptPhase* find_phase(const std::string& phase_id) const;

  /// End of the last phase; the simulated frame stream stops here.
  std::int64_t end_ms() const;

  /// Throws ConfigError when phases overlap, configs are inconsistent, or a
  /// window falls outside its phase.
  void validate() const;
};

TestScript parse_script(const std::string& bytes);
std::string serialize_script(const TestScript& script);

/// World position of the pursuit target at absolute time t_ms. The target
/// starts at the path start when the phase begins and stops at the path end
/// once the full length has been traveled.
Vec3 dynamic_target_position(const DynamicGazeConfig& cfg,
                             const ArcLengthTable& table,
                             std::int64_t phase_start_ms, std::int64_t t_ms);

}  // namespace gazekit
