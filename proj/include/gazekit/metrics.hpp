#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gazekit/session.hpp"

namespace gazekit {

/// Angular speed over one consecutive frame pair, stamped at the later frame.
struct SpeedSample {
  std::int64_t t_ms = 0;
  double speed_deg_per_s = 0.0;
};

/// Eye-movement speed per frame pair from world gaze directions, using actual
/// timestamp differences. Pairs spanning closed eyes or dropout gaps emit no
/// sample; fewer than two usable frames yield an empty series.
std::vector<SpeedSample> speed_series(std::span<const GazeFrame> frames,
                                      double frame_dt_ms = 14.0);

enum class EyeEventKind { Fixation, Saccade, Blink, Dropout };

const char* to_string(EyeEventKind kind);

struct EyeEventSegment {
  EyeEventKind kind = EyeEventKind::Fixation;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

/// Velocity-threshold segmentation. Saccades need speed above the threshold
/// for at least `min_run` consecutive samples; blinks come from eye openness,
/// dropouts from timestamp gaps. Segments partition [first, last] exactly.
std::vector<EyeEventSegment> segment_events(
    std::span<const SpeedSample> speeds, std::span<const GazeFrame> frames,
    double threshold_deg_s = 100.0, int min_run = 2, double frame_dt_ms = 14.0);

}  // namespace gazekit
