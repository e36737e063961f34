#include "gazekit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

namespace {

// Substream tags; combined with the seed and a discriminator via seed_seq.
constexpr std::uint32_t kStreamExcursion = 0x45584355;
constexpr std::uint32_t kStreamExcursionAxis = 0x45584158;
constexpr std::uint32_t kStreamNoise = 0x4e4f4953;
constexpr std::uint32_t kStreamBlink = 0x424c4e4b;

std::mt19937_64 make_stream(std::int64_t seed, std::uint32_t tag,
                            std::int64_t discriminator = 0) {
  const auto u = static_cast<std::uint64_t>(seed);
  const auto d = static_cast<std::uint64_t>(discriminator);
  std::seed_seq seq{static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(u >> 32),
                    tag, static_cast<std::uint32_t>(d),
                    static_cast<std::uint32_t>(d >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; only the cosine branch so one draw costs two uniforms.
double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // in (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

/// Unit axis perpendicular to dir, at the given azimuth around it.
Vec3 perpendicular_axis(const Vec3& dir, double azimuth_rad) {
  const Vec3 ref =
      std::abs(dir.y()) < 0.99 ? Vec3(Vec3::UnitY()) : Vec3(Vec3::UnitX());
  const Vec3 e0 = dir.cross(ref).normalized();
  const Vec3 e1 = dir.cross(e0).normalized();
  return std::cos(azimuth_rad) * e0 + std::sin(azimuth_rad) * e1;
}

Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle_deg) {
  return Eigen::AngleAxisd(deg_to_rad(angle_deg), axis) * v;
}

struct FlatModel {
  double latency_ms = 0.0;
  double noise_sigma_deg = 0.0;
  bool distracted = false;
  double excursion_rate_per_s = 0.0;
  double excursion_amplitude_deg = 0.0;
  std::int64_t excursion_duration_ms = 0;
  std::vector<ScheduledExcursion> scheduled;
};

void validate_model(const GazerModel& m, bool nested = false) {
  switch (m.kind) {
    case GazerModel::Kind::Ideal:
      break;
    case GazerModel::Kind::Delayed:
      if (m.latency_ms < 0.0) {
        throw ConfigError("gazer model: latency_ms must be non-negative");
      }
      break;
    case GazerModel::Kind::Noisy:
      if (m.noise_sigma_deg < 0.0) {
        throw ConfigError("gazer model: noise_sigma_deg must be non-negative");
      }
      break;
    case GazerModel::Kind::Distracted: {
      if (m.excursion_rate_per_s < 0.0) {
        throw ConfigError("gazer model: excursion rate must be non-negative");
      }
      if (!(m.excursion_amplitude_deg > 0.0)) {
        throw ConfigError("gazer model: excursion amplitude must be positive");
      }
      if (m.scheduled_excursions.empty() && m.excursion_duration_ms <= 0) {
        throw ConfigError("gazer model: excursion duration must be positive");
      }
      std::int64_t prev_end = -1;
      for (const ScheduledExcursion& e : m.scheduled_excursions) {
        if (e.duration_ms <= 0 || e.start_ms < prev_end) {
          throw ConfigError(
              "gazer model: scheduled excursions must be ordered and disjoint");
        }
        prev_end = e.start_ms + e.duration_ms;
      }
      break;
    }
    case GazerModel::Kind::Composite: {
      if (nested) {
        throw ConfigError("gazer model: composites cannot nest");
      }
      if (m.children.empty()) {
        throw ConfigError("gazer model: composite has no children");
      }
      std::set<GazerModel::Kind> kinds;
      for (const GazerModel& child : m.children) {
        if (child.kind == GazerModel::Kind::Composite) {
          throw ConfigError("gazer model: composites cannot nest");
        }
        if (!kinds.insert(child.kind).second) {
          throw ConfigError("gazer model: duplicate child kind");
        }
        validate_model(child, true);
      }
      break;
    }
  }
}

FlatModel flatten(const GazerModel& m) {
  FlatModel flat;
  const auto absorb = [&flat](const GazerModel& part) {
    switch (part.kind) {
      case GazerModel::Kind::Delayed:
        flat.latency_ms = part.latency_ms;
        break;
      case GazerModel::Kind::Noisy:
        flat.noise_sigma_deg = part.noise_sigma_deg;
        break;
      case GazerModel::Kind::Distracted:
        flat.distracted = true;
        flat.excursion_rate_per_s = part.excursion_rate_per_s;
        flat.excursion_amplitude_deg = part.excursion_amplitude_deg;
        flat.excursion_duration_ms = part.excursion_duration_ms;
        flat.scheduled = part.scheduled_excursions;
        break;
      default:
        break;
    }
  };
  if (m.kind == GazerModel::Kind::Composite) {
    for (const GazerModel& child : m.children) {
      absorb(child);
    }
  } else {
    absorb(m);
  }
  return flat;
}

std::vector<ScheduledExcursion> generate_excursions(
    std::int64_t seed, const FlatModel& flat, const SimConfig& cfg,
    std::int64_t phase_start, std::int64_t phase_end) {
  std::vector<ScheduledExcursion> out;
  if (flat.excursion_rate_per_s <= 0.0) {
    return out;
  }
  std::mt19937_64 rng = make_stream(seed, kStreamExcursion, phase_start);
  const double min_gap_ms = 2.0 * cfg.frame_dt_ms;
  double t = static_cast<double>(phase_start);
  double last_end = -1e300;
  while (true) {
    const double gap_s =
        -std::log(1.0 - uniform01(rng)) / flat.excursion_rate_per_s;
    t += gap_s * 1000.0;
    if (t + static_cast<double>(flat.excursion_duration_ms) >
        static_cast<double>(phase_end)) {
      break;
    }
    if (t < last_end + min_gap_ms) {
      continue;  // too close to the previous excursion; keep marching
    }
    out.push_back(ScheduledExcursion{std::llround(t), flat.excursion_duration_ms});
    last_end = t + static_cast<double>(flat.excursion_duration_ms);
  }
  return out;
}

std::vector<ScheduledExcursion> excursions_for_phase(
    const FlatModel& flat, const SimConfig& cfg, const ScriptPhase& phase) {
  if (!flat.distracted) {
    return {};
  }
  if (!flat.scheduled.empty()) {
    std::vector<ScheduledExcursion> out;
    for (const ScheduledExcursion& e : flat.scheduled) {
      if (e.start_ms >= phase.start_ms && e.start_ms < phase.end_ms) {
        out.push_back(e);
      }
    }
    return out;
  }
  return generate_excursions(cfg.seed, flat, cfg, phase.start_ms, phase.end_ms);
}

struct BlinkInterval {
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
};

std::vector<BlinkInterval> generate_blinks(const SimConfig& cfg,
                                           std::int64_t session_end) {
  std::vector<BlinkInterval> out;
  if (cfg.blink_rate_per_s <= 0.0 || cfg.blink_duration_ms <= 0) {
    return out;
  }
  std::mt19937_64 rng = make_stream(cfg.seed, kStreamBlink);
  double t = 0.0;
  while (true) {
    t += -std::log(1.0 - uniform01(rng)) / cfg.blink_rate_per_s * 1000.0;
    const std::int64_t start = std::llround(t);
    const std::int64_t end = start + cfg.blink_duration_ms;
    if (end >= session_end) {
      break;
    }
    if (!out.empty() && start <= out.back().end_ms) {
      continue;
    }
    out.push_back(BlinkInterval{start, end});
    t = static_cast<double>(end);
  }
  return out;
}

HeadPose head_pose_at(double t_ms, const HeadMotion& motion) {
  HeadPose pose;
  if (motion.kind == HeadMotion::Kind::SmallSway && motion.period_s > 0.0) {
    const double phase = 2.0 * kPi * (t_ms / 1000.0) / motion.period_s;
    pose.position.x() = motion.amplitude_m * std::sin(phase);
    pose.rotation = Quat(Eigen::AngleAxisd(
        deg_to_rad(motion.yaw_amplitude_deg) * std::sin(phase),
        Vec3::UnitY()));
  }
  return pose;
}

/// One entry of the scripted target timeline: either a fixed world point
/// presented at onset_ms, or the start of a continuously moving path target.
struct TimelineEntry {
  std::int64_t onset_ms = 0;
  bool moving = false;
  Vec3 position{Vec3::Zero()};
  const DynamicGazeConfig* dynamic = nullptr;
  const ArcLengthTable* table = nullptr;
  std::int64_t phase_start_ms = 0;
};

std::vector<TimelineEntry> build_timeline(
    const TestScript& script, const std::vector<ArcLengthTable>& tables) {
  std::vector<TimelineEntry> timeline;
  std::size_t table_index = 0;
  for (const ScriptPhase& phase : script.phases) {
    if (const auto* cfg = std::get_if<StaticGazeConfig>(&phase.config)) {
      for (const StaticPoint& pt : cfg->points) {
        timeline.push_back(TimelineEntry{pt.onset_ms, false, pt.position,
                                         nullptr, nullptr, 0});
      }
    } else if (const auto* cfg = std::get_if<DynamicGazeConfig>(&phase.config)) {
      TimelineEntry entry;
      entry.onset_ms = phase.start_ms;
      entry.moving = true;
      entry.dynamic = cfg;
      entry.table = &tables[table_index++];
      entry.phase_start_ms = phase.start_ms;
      timeline.push_back(entry);
    } else {
      for (const SaccadicStimulus& s :
           std::get<SaccadicConfig>(phase.config).stimuli) {
        timeline.push_back(TimelineEntry{s.onset_ms, false, s.target_position,
                                         nullptr, nullptr, 0});
      }
    }
  }
  std::sort(timeline.begin(), timeline.end(),
            [](const TimelineEntry& a, const TimelineEntry& b) {
              return a.onset_ms < b.onset_ms;
            });
  return timeline;
}

/// World target the gazer aims at when sampling time tau_ms (which lags the
/// frame time under a Delayed model). Falls back to straight ahead of the
/// head before the first scripted target.
Vec3 scripted_target(const std::vector<TimelineEntry>& timeline, double tau_ms,
                     const TestScript& script, const HeadMotion& motion) {
  const TimelineEntry* latest = nullptr;
  for (const TimelineEntry& entry : timeline) {
    if (static_cast<double>(entry.onset_ms) <= tau_ms) {
      latest = &entry;
    } else {
      break;
    }
  }
  if (latest == nullptr) {
    const HeadPose head = head_pose_at(tau_ms, motion);
    return head.position + head.rotation * Vec3(0.0, 0.0, script.screen.distance);
  }
  if (!latest->moving) {
    return latest->position;
  }
  const double elapsed_ms =
      std::max(tau_ms - static_cast<double>(latest->phase_start_ms), 0.0);
  const double s = std::min(latest->dynamic->target_speed * (elapsed_ms / 1000.0),
                            latest->table->total_length);
  return position_at_distance(latest->dynamic->path, *latest->table, s);
}

}  // namespace

GazerModel GazerModel::delayed(double latency_ms) {
  GazerModel m;
  m.kind = Kind::Delayed;
  m.latency_ms = latency_ms;
  return m;
}

GazerModel GazerModel::noisy(double sigma_deg) {
  GazerModel m;
  m.kind = Kind::Noisy;
  m.noise_sigma_deg = sigma_deg;
  return m;
}

GazerModel GazerModel::distracted(double rate_per_s, double amplitude_deg,
                                  std::int64_t duration_ms) {
  GazerModel m;
  m.kind = Kind::Distracted;
  m.excursion_rate_per_s = rate_per_s;
  m.excursion_amplitude_deg = amplitude_deg;
  m.excursion_duration_ms = duration_ms;
  return m;
}

GazerModel GazerModel::scripted_distracted(double amplitude_deg,
                                           std::vector<ScheduledExcursion> plan) {
  GazerModel m;
  m.kind = Kind::Distracted;
  m.excursion_amplitude_deg = amplitude_deg;
  m.scheduled_excursions = std::move(plan);
  return m;
}

GazerModel GazerModel::composite(std::vector<GazerModel> children) {
  GazerModel m;
  m.kind = Kind::Composite;
  m.children = std::move(children);
  return m;
}

std::vector<ScheduledExcursion> scripted_excursions(const GazerModel& model,
                                                    const SimConfig& cfg,
                                                    const ScriptPhase& phase) {
  validate_model(model);
  return excursions_for_phase(flatten(model), cfg, phase);
}

SessionRecord simulate_session(const TestScript& script, const GazerModel& model,
                               const SimConfig& cfg) {
  script.validate();
  validate_model(model);
  if (!(cfg.frame_dt_ms > 0.0)) {
    throw ConfigError("sim config: frame_dt_ms must be positive");
  }
  const FlatModel flat = flatten(model);

  std::vector<ArcLengthTable> tables;
  for (const ScriptPhase& phase : script.phases) {
    if (const auto* cfg_dyn = std::get_if<DynamicGazeConfig>(&phase.config)) {
      tables.push_back(build_arc_length_table(cfg_dyn->path));
    }
  }
  const std::vector<TimelineEntry> timeline = build_timeline(script, tables);

  struct PlannedExcursion {
    ScheduledExcursion window;
    double azimuth_rad = 0.0;
  };
  std::vector<PlannedExcursion> excursions;
  if (flat.distracted) {
    std::vector<ScheduledExcursion> all;
    if (!flat.scheduled.empty()) {
      all = flat.scheduled;
    } else {
      for (const ScriptPhase& phase : script.phases) {
        const auto phase_plan = excursions_for_phase(flat, cfg, phase);
        all.insert(all.end(), phase_plan.begin(), phase_plan.end());
      }
    }
    for (std::size_t k = 0; k < all.size(); ++k) {
      std::mt19937_64 axis_rng = make_stream(
          cfg.seed, kStreamExcursionAxis, static_cast<std::int64_t>(k));
      excursions.push_back(
          PlannedExcursion{all[k], 2.0 * kPi * uniform01(axis_rng)});
    }
  }

  const std::int64_t session_end = script.end_ms();
  const std::vector<BlinkInterval> blinks = generate_blinks(cfg, session_end);

  std::mt19937_64 noise_rng = make_stream(cfg.seed, kStreamNoise);
  const bool noisy = flat.noise_sigma_deg > 0.0;

  SessionRecord record;
  record.meta.name = "simulated";
  record.meta.age = 0;
  record.meta.gender = "unspecified";
  record.meta.device = "gazekit-sim";
  record.meta.frame_dt_ms = cfg.frame_dt_ms;
  record.meta.seed = cfg.seed;

  std::size_t excursion_cursor = 0;
  std::size_t blink_cursor = 0;
  UnitDir last_local(0.0, 0.0, 1.0);
  bool has_prev_world = false;
  Vec3 prev_world = Vec3::UnitZ();
  const double max_slew_deg =
      cfg.saccade_transition_speed_deg_s * cfg.frame_dt_ms / 1000.0;
  for (std::int64_t i = 0;; ++i) {
    const std::int64_t t =
        std::llround(static_cast<double>(i) * cfg.frame_dt_ms);
    if (t >= session_end) {
      break;
    }
    const HeadPose head = head_pose_at(static_cast<double>(t), cfg.head_motion);

    const double tau = static_cast<double>(t) - flat.latency_ms;
    const Vec3 target =
        scripted_target(timeline, std::max(tau, 0.0), script, cfg.head_motion);
    const Vec3 eye = head.position;

    Vec3 dir = target - eye;
    if (dir.norm() == 0.0) {
      dir = head.rotation * Vec3(0.0, 0.0, 1.0);
    }
    dir.normalize();

    double noise_angle = 0.0;
    double noise_azimuth = 0.0;
    if (noisy) {
      noise_angle = std::abs(standard_normal(noise_rng)) * flat.noise_sigma_deg;
      noise_azimuth = 2.0 * kPi * uniform01(noise_rng);
    }
    if (noise_angle > 0.0) {
      dir = rotate_about(dir, perpendicular_axis(dir, noise_azimuth),
                         noise_angle)
                .normalized();
    }

    while (excursion_cursor < excursions.size() &&
           t >= excursions[excursion_cursor].window.start_ms +
                    excursions[excursion_cursor].window.duration_ms) {
      ++excursion_cursor;
    }
    if (excursion_cursor < excursions.size() &&
        t >= excursions[excursion_cursor].window.start_ms) {
      const PlannedExcursion& ex = excursions[excursion_cursor];
      dir = rotate_about(dir, perpendicular_axis(dir, ex.azimuth_rad),
                         flat.excursion_amplitude_deg)
                .normalized();
    }

    if (max_slew_deg > 0.0 && has_prev_world) {
      const double gap_deg = angle_between_deg(prev_world, dir);
      if (gap_deg > max_slew_deg) {
        Vec3 axis = prev_world.cross(dir);
        if (axis.norm() < 1e-12) {
          axis = perpendicular_axis(prev_world, 0.0);  // antipodal gaze
        }
        dir = (Eigen::AngleAxisd(deg_to_rad(max_slew_deg), axis.normalized()) *
               prev_world)
                  .normalized();
      }
    }

    while (blink_cursor < blinks.size() && t >= blinks[blink_cursor].end_ms) {
      ++blink_cursor;
    }
    const bool blinking =
        blink_cursor < blinks.size() && t >= blinks[blink_cursor].start_ms;

    GazeFrame frame;
    frame.t_ms = t;
    frame.head = head;
    if (blinking) {
      frame.gaze_local = last_local;  // eyes shut; hold the last direction
      frame.left_open = false;
      frame.right_open = false;
    } else {
      frame.gaze_local = UnitDir(head.rotation.conjugate() * dir);
      last_local = frame.gaze_local;
    }
    prev_world = head.rotation * frame.gaze_local.vec();
    has_prev_world = true;
    record.frames.push_back(frame);
  }

  for (const ScriptPhase& phase : script.phases) {
    record.phases.push_back(phase.descriptor());
    if (const auto* sc = std::get_if<SaccadicConfig>(&phase.config)) {
      for (const SaccadicStimulus& s : sc->stimuli) {
        record.events.push_back(
            StimulusEvent{s.event_id, s.onset_ms, s.target_position, s.zone});
      }
    }
  }

  validate_session(record);
  return record;
}

GazerSpec parse_gazer_spec(const std::string& bytes) {
  json j = jsonio::parse_json(bytes);

  const std::function<GazerModel(const json&, const std::string&)> read_model =
      [&read_model](const json& mj, const std::string& at) -> GazerModel {
    GazerModel m;
    const std::string kind =
        jsonio::as_string(jsonio::member(mj, "kind", at), at + ".kind");
    if (kind == "ideal") {
      m.kind = GazerModel::Kind::Ideal;
    } else if (kind == "delayed") {
      m.kind = GazerModel::Kind::Delayed;
      m.latency_ms = jsonio::as_number(jsonio::member(mj, "latency_ms", at),
                                       at + ".latency_ms");
    } else if (kind == "noisy") {
      m.kind = GazerModel::Kind::Noisy;
      m.noise_sigma_deg = jsonio::as_number(
          jsonio::member(mj, "noise_sigma_deg", at), at + ".noise_sigma_deg");
    } else if (kind == "distracted") {
      m.kind = GazerModel::Kind::Distracted;
      m.excursion_amplitude_deg =
          jsonio::as_number(jsonio::member(mj, "excursion_amplitude_deg", at),
                            at + ".excursion_amplitude_deg");
      if (mj.contains("excursion_rate_per_s")) {
        m.excursion_rate_per_s = jsonio::as_number(
            mj["excursion_rate_per_s"], at + ".excursion_rate_per_s");
      }
      if (mj.contains("excursion_duration_ms")) {
        m.excursion_duration_ms = jsonio::as_integer(
            mj["excursion_duration_ms"], at + ".excursion_duration_ms");
      }
      if (mj.contains("scheduled_excursions")) {
        const json& plan = jsonio::as_array(mj["scheduled_excursions"],
                                            at + ".scheduled_excursions");
        for (std::size_t i = 0; i < plan.size(); ++i) {
          const std::string pat =
              at + ".scheduled_excursions[" + std::to_string(i) + "]";
          m.scheduled_excursions.push_back(ScheduledExcursion{
              jsonio::as_integer(jsonio::member(plan[i], "start_ms", pat),
                                 pat + ".start_ms"),
              jsonio::as_integer(jsonio::member(plan[i], "duration_ms", pat),
                                 pat + ".duration_ms")});
        }
      }
    } else if (kind == "composite") {
      m.kind = GazerModel::Kind::Composite;
      const json& children =
          jsonio::as_array(jsonio::member(mj, "children", at), at + ".children");
      for (std::size_t i = 0; i < children.size(); ++i) {
        m.children.push_back(read_model(
            children[i], at + ".children[" + std::to_string(i) + "]"));
      }
    } else {
      jsonio::fail(at + ".kind", "unknown gazer model kind \"" + kind + "\"");
    }
    return m;
  };

  GazerSpec spec;
  spec.model = read_model(jsonio::member(j, "model", "gazer"), "model");
  if (j.contains("sim")) {
    const json& sj = j["sim"];
    if (sj.contains("seed")) {
      spec.sim.seed = jsonio::as_integer(sj["seed"], "sim.seed");
    }
    if (sj.contains("frame_dt_ms")) {
      spec.sim.frame_dt_ms =
          jsonio::as_number(sj["frame_dt_ms"], "sim.frame_dt_ms");
    }
    if (sj.contains("blink_rate_per_s")) {
      spec.sim.blink_rate_per_s =
          jsonio::as_number(sj["blink_rate_per_s"], "sim.blink_rate_per_s");
    }
    if (sj.contains("blink_duration_ms")) {
      spec.sim.blink_duration_ms =
          jsonio::as_integer(sj["blink_duration_ms"], "sim.blink_duration_ms");
    }
    if (sj.contains("saccade_transition_speed_deg_s")) {
      spec.sim.saccade_transition_speed_deg_s =
          jsonio::as_number(sj["saccade_transition_speed_deg_s"],
                            "sim.saccade_transition_speed_deg_s");
    }
    if (sj.contains("head_motion")) {
      const json& hm = sj["head_motion"];
      const std::string kind = jsonio::as_string(
          jsonio::member(hm, "kind", "sim.head_motion"), "sim.head_motion.kind");
      if (kind == "static") {
        spec.sim.head_motion.kind = HeadMotion::Kind::Static;
      } else if (kind == "small_sway") {
        spec.sim.head_motion.kind = HeadMotion::Kind::SmallSway;
        spec.sim.head_motion.amplitude_m = jsonio::as_number(
            jsonio::member(hm, "amplitude_m", "sim.head_motion"),
            "sim.head_motion.amplitude_m");
        spec.sim.head_motion.period_s = jsonio::as_number(
            jsonio::member(hm, "period_s", "sim.head_motion"),
            "sim.head_motion.period_s");
        if (hm.contains("yaw_amplitude_deg")) {
          spec.sim.head_motion.yaw_amplitude_deg = jsonio::as_number(
              hm["yaw_amplitude_deg"], "sim.head_motion.yaw_amplitude_deg");
        }
      } else {
        jsonio::fail("sim.head_motion.kind",
                     "unknown head motion \"" + kind + "\"");
      }
    }
  }
  try {
    validate_model(spec.model);
  } catch (const ConfigError& e) {
    throw ValidationError(e.what());
  }
  return spec;
}

}  // namespace gazekit
