#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazekit/metrics.hpp"
#include "gazekit/script.hpp"
#include "gazekit/session.hpp"

namespace gazekit {

/// Hold/pursuit quality over a window: how often and for how long the gaze
/// left the target after first acquiring it.
struct GazeHoldStats {
  int offset_count = 0;
  std::int64_t offset_duration_ms = 0;
  std::int64_t total_duration_ms = 0;
  double accuracy = 1.0;  // (total - offset) / total; 1.0 when total is 0
};

struct StaticPointResult {
  std::string point_id;
  ScreenZone zone = ScreenZone::Center;
  bool acquired = false;
  std::optional<std::int64_t> reaction_ms;  // absent when never acquired
  GazeHoldStats stats;
};

struct StaticResults {
  std::vector<StaticPointResult> per_point;
  std::map<ScreenZone, GazeHoldStats> per_zone;
  std::map<ScreenZone, double> per_zone_mean_reaction_ms;  // acquired only
};

struct FitSample {
  std::int64_t t_ms = 0;
  double fit = 0.0;  // 1 - min(error, cap)/cap, in [0,1]
};

struct DynamicResults {
  GazeHoldStats overall;
  std::vector<FitSample> fit_series;
  double mean_fit = 0.0;
  std::map<ScreenZone, GazeHoldStats> per_zone;  // keyed by target zone
};

struct SaccadicResultEntry {
  std::string event_id;
  ScreenZone zone = ScreenZone::Center;
  bool timed_out = false;
  std::optional<std::int64_t> reaction_ms;
  std::vector<SpeedSample> trace;  // [onset - 200 ms, onset + timeout]
};

struct SaccadicResults {
  std::vector<SaccadicResultEntry> events;
  std::map<ScreenZone, double> per_zone_mean_reaction_ms;
  int timed_out_count = 0;
};

struct ProtocolResults {
  std::optional<StaticResults> static_gaze;
  std::optional<DynamicResults> dynamic_gaze;
  std::optional<SaccadicResults> saccadic;
};

/// Milliseconds of speed trace kept before each stimulus onset.
inline constexpr std::int64_t kTraceLeadMs = 200;

StaticResults analyze_static(std::span<const GazeFrame> frames,
                             const StaticGazeConfig& cfg,
                             const AnalysisConfig& analysis = {},
                             double frame_dt_ms = 14.0);

DynamicResults analyze_dynamic(std::span<const GazeFrame> frames,
                               const DynamicGazeConfig& cfg,
                               std::int64_t phase_start_ms,
                               std::int64_t phase_end_ms,
                               const VirtualScreen& screen = {},
                               const AnalysisConfig& analysis = {},
                               double frame_dt_ms = 14.0);

SaccadicResults analyze_saccadic(std::span<const GazeFrame> frames,
                                 const SaccadicConfig& cfg,
                                 const VirtualScreen& screen = {},
                                 const AnalysisConfig& analysis = {},
                                 double frame_dt_ms = 14.0);

/// Runs every scripted phase against the matching session phase. The session
/// and script must agree on phase ids and kinds.
ProtocolResults analyze_session(const SessionRecord& record,
                                const TestScript& script);

/// Canonical results interchange, mirroring the session format.
std::string serialize_results(const ProtocolResults& results);
ProtocolResults parse_results(const std::string& bytes);

}  // namespace gazekit
