#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazekit/script.hpp"
#include "gazekit/session.hpp"

namespace gazekit {

struct ScheduledExcursion {
  std::int64_t start_ms = 0;
  std::int64_t duration_ms = 0;
};

/// Synthetic gazer behavior. Ideal looks exactly at the scripted target;
/// Delayed looks at where the target was latency_ms ago; Noisy perturbs the
/// direction by |N(0, sigma)| degrees about a random perpendicular axis;
/// Distracted injects fixed-amplitude excursions on a Poisson-like schedule
/// (or an explicit scripted one). Composite applies its children in the
/// order Delayed -> Noisy -> Distracted.
struct GazerModel {
  enum class Kind { Ideal, Delayed, Noisy, Distracted, Composite };
  Kind kind = Kind::Ideal;
  double latency_ms = 0.0;
  double noise_sigma_deg = 0.0;
  double excursion_rate_per_s = 0.0;
  double excursion_amplitude_deg = 0.0;
  std::int64_t excursion_duration_ms = 0;
  std::vector<ScheduledExcursion> scheduled_excursions;
  std::vector<GazerModel> children;

  static GazerModel ideal() { return {}; }
  static GazerModel delayed(double latency_ms);
  static GazerModel noisy(double sigma_deg);
  static GazerModel distracted(double rate_per_s, double amplitude_deg,
                               std::int64_t duration_ms);
  static GazerModel scripted_distracted(double amplitude_deg,
                                        std::vector<ScheduledExcursion> plan);
  static GazerModel composite(std::vector<GazerModel> children);
};

struct HeadMotion {
  enum class Kind { Static, SmallSway };
  Kind kind = Kind::Static;
  double amplitude_m = 0.0;
  double period_s = 4.0;
  double yaw_amplitude_deg = 2.0;
};

/// Deterministic simulation parameters. A fixed seed fully determines the
/// output stream. Randomness comes from mt19937_64 substreams (seeded via
/// std::seed_seq) with 53-bit uniforms and Box-Muller normals, so the same
/// seed replays identically.
///
/// Gaze jumps are instantaneous by default; a positive transition speed
/// slews the gaze toward its target along a great circle at that rate
/// instead, for realistic speed traces.
struct SimConfig {
  std::int64_t seed = 0;
  double frame_dt_ms = 14.0;
  HeadMotion head_motion;
  double blink_rate_per_s = 0.0;  // blinks are off by default
  std::int64_t blink_duration_ms = 150;
  double saccade_transition_speed_deg_s = 0.0;  // 0 = instantaneous
};

/// Runs the script against the gazer model and returns the full session,
/// with metadata recording the seed.
SessionRecord simulate_session(const TestScript& script, const GazerModel& model,
                               const SimConfig& cfg);

/// The exact excursion schedule the simulator will use within one phase,
/// so tests can assert offset counts without re-deriving the randomness.
/// Empty for models without a Distracted component.
std::vector<ScheduledExcursion> scripted_excursions(const GazerModel& model,
                                                    const SimConfig& cfg,
                                                    const ScriptPhase& phase);

/// Model plus optional sim settings, as stored in a gazer-model JSON file.
struct GazerSpec {
  GazerModel model;
  SimConfig sim;
};

GazerSpec parse_gazer_spec(const std::string& bytes);

}  // namespace gazekit
