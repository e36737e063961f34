#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "gazekit/errors.hpp"
#include "gazekit/geometry.hpp"

namespace gazekit::jsonio {

using json = nlohmann::json;

// Field accessors that name the offending path in every diagnostic.
// `at` is a dotted path like "meta.frame_dt_ms" or "frames[3].t_ms".

[[noreturn]] inline void fail(const std::string& at, const std::string& what) {
  throw ValidationError(at + ": " + what);
}

inline const json& member(const json& j, const char* key, const std::string& at) {
  if (!j.is_object()) {
    fail(at, "expected an object");
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(at + "." + key, "missing required field");
  }
  return *it;
}

inline double as_number(const json& j, const std::string& at) {
  if (!j.is_number()) {
    fail(at, "expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    fail(at, "expected a finite number");
  }
  return v;
}

inline std::int64_t as_integer(const json& j, const std::string& at) {
  if (!j.is_number_integer()) {
    fail(at, "expected an integer");
  }
  return j.get<std::int64_t>();
}

inline bool as_bool(const json& j, const std::string& at) {
  if (!j.is_boolean()) {
    fail(at, "expected a boolean");
  }
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& at) {
  if (!j.is_string()) {
    fail(at, "expected a string");
  }
  return j.get<std::string>();
}

inline const json& as_array(const json& j, const std::string& at) {
  if (!j.is_array()) {
    fail(at, "expected an array");
  }
  return j;
}

inline json vec3_to_json(const Vec3& v) {
  return json{{"x", v.x()}, {"y", v.y()}, {"z", v.z()}};
}

inline Vec3 vec3_from_json(const json& j, const std::string& at) {
  Vec3 v(as_number(member(j, "x", at), at + ".x"),
         as_number(member(j, "y", at), at + ".y"),
         as_number(member(j, "z", at), at + ".z"));
  return v;
}

inline json quat_to_json(const Quat& q) {
  return json{{"w", q.w()}, {"x", q.x()}, {"y", q.y()}, {"z", q.z()}};
}

/// Reads a quaternion and renormalizes it; a norm farther than
/// `tolerance` from 1 is rejected.
inline Quat quat_from_json(const json& j, const std::string& at,
                           double tolerance = 1e-3) {
  Quat q(as_number(member(j, "w", at), at + ".w"),
         as_number(member(j, "x", at), at + ".x"),
         as_number(member(j, "y", at), at + ".y"),
         as_number(member(j, "z", at), at + ".z"));
  const double n = q.norm();
  if (std::abs(n - 1.0) > tolerance) {
    fail(at, "quaternion norm " + std::to_string(n) + " outside tolerance");
  }
  if (std::abs(n - 1.0) > 1e-12) {
    q.normalize();  // keep already-unit values bit-exact for round trips
  }
  return q;
}

/// Reads a direction vector and renormalizes it under the same tolerance
/// rule as quaternions.
inline UnitDir unit_dir_from_json(const json& j, const std::string& at,
                                  double tolerance = 1e-3) {
  const Vec3 v = vec3_from_json(j, at);
  const double n = v.norm();
  if (std::abs(n - 1.0) > tolerance) {
    fail(at, "direction norm " + std::to_string(n) + " outside tolerance");
  }
  return UnitDir(v);
}

inline ScreenZone zone_from_json(const json& j, const std::string& at) {
  const std::string name = as_string(j, at);
  try {
    return zone_from_string(name);
  } catch (const std::invalid_argument&) {
    fail(at, "unknown screen zone \"" + name + "\"");
  }
}

/// Canonical byte form: sorted keys (nlohmann object ordering), shortest
/// round-trip number rendering, compact separators, trailing newline.
inline std::string canonical_dump(const json& j) {
  return j.dump() + "\n";
}

/// Total JSON parse: any library exception (syntax error, number overflow,
/// bad UTF-8) becomes a ValidationError, with the byte offset when known.
inline json parse_json(const std::string& bytes) {
  try {
    return json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError("JSON parse error at byte " + std::to_string(e.byte) +
                          ": " + e.what());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace gazekit::jsonio
