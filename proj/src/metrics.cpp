#include "gazekit/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace gazekit {

const char* to_string(EyeEventKind kind) {
  switch (kind) {
    case EyeEventKind::Fixation: return "fixation";
    case EyeEventKind::Saccade: return "saccade";
    case EyeEventKind::Blink: return "blink";
    case EyeEventKind::Dropout: return "dropout";
  }
  throw std::logic_error("to_string: bad EyeEventKind");
}

std::vector<SpeedSample> speed_series(std::span<const GazeFrame> frames,
                                      double frame_dt_ms) {
  std::vector<SpeedSample> out;
  if (frames.size() < 2) {
    return out;
  }
  const double gap_limit = kDropoutToleranceFactor * frame_dt_ms;
  out.reserve(frames.size() - 1);
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    const GazeFrame& a = frames[i];
    const GazeFrame& b = frames[i + 1];
    if (a.eyes_closed() || b.eyes_closed()) {
      continue;
    }
    const std::int64_t gap = b.t_ms - a.t_ms;
    if (static_cast<double>(gap) > gap_limit) {
      continue;
    }
    const Vec3 da = a.head.rotation * a.gaze_local.vec();
    const Vec3 db = b.head.rotation * b.gaze_local.vec();
    const double theta = angle_between_deg(da, db);
    out.push_back(SpeedSample{
        b.t_ms, angular_speed_deg(theta, static_cast<double>(gap) / 1000.0)});
  }
  return out;
}

std::vector<EyeEventSegment> segment_events(std::span<const SpeedSample> speeds,
                                            std::span<const GazeFrame> frames,
                                            double threshold_deg_s, int min_run,
                                            double frame_dt_ms) {
  std::vector<EyeEventSegment> out;
  if (frames.size() < 2) {
    return out;
  }
  const double gap_limit = kDropoutToleranceFactor * frame_dt_ms;

  // Classify each inter-frame interval, then merge adjacent equal kinds.
  const std::size_t n = frames.size() - 1;
  std::vector<EyeEventKind> kinds(n, EyeEventKind::Fixation);
  for (std::size_t i = 0; i < n; ++i) {
    const GazeFrame& a = frames[i];
    const GazeFrame& b = frames[i + 1];
    if (static_cast<double>(b.t_ms - a.t_ms) > gap_limit) {
      kinds[i] = EyeEventKind::Dropout;
    } else if (a.eyes_closed() || b.eyes_closed()) {
      kinds[i] = EyeEventKind::Blink;
    }
  }

  // Saccade candidates from the speed samples (stamped at the pair's later
  // frame); runs shorter than min_run stay fixation.
  std::vector<bool> fast(n, false);
  std::size_t si = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t pair_end = frames[i + 1].t_ms;
    while (si < speeds.size() && speeds[si].t_ms < pair_end) {
      ++si;
    }
    if (si < speeds.size() && speeds[si].t_ms == pair_end &&
        speeds[si].speed_deg_per_s > threshold_deg_s &&
        kinds[i] == EyeEventKind::Fixation) {
      fast[i] = true;
    }
  }
  for (std::size_t i = 0; i < n;) {
    if (!fast[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && fast[j]) {
      ++j;
    }
    if (static_cast<int>(j - i) >= min_run) {
      for (std::size_t k = i; k < j; ++k) {
        kinds[k] = EyeEventKind::Saccade;
      }
    }
    i = j;
  }

  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && kinds[j] == kinds[i]) {
      ++j;
    }
    out.push_back(EyeEventSegment{kinds[i], frames[i].t_ms, frames[j].t_ms});
    i = j;
  }
  return out;
}

}  // namespace gazekit
