#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace gazekit {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using QuatT = Eigen::Quaternion<Scalar>;
template <typename Scalar>
using Mat4T = Eigen::Matrix<Scalar, 4, 4>;

using Vec3 = Vec3T<double>;
using Quat = QuatT<double>;
using Mat4 = Mat4T<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

template <typename Scalar>
constexpr Scalar deg_to_rad(Scalar deg) {
  return deg * static_cast<Scalar>(kPi) / static_cast<Scalar>(180);
}
template <typename Scalar>
constexpr Scalar rad_to_deg(Scalar rad) {
  return rad * static_cast<Scalar>(180) / static_cast<Scalar>(kPi);
}

/// Angle in degrees between two direction expressions, in [0, 180].
/// Inputs need not be normalized.
template <typename DerivedA, typename DerivedB>
double angle_between_deg(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("angle_between_deg: zero-length direction");
  }
  const double d = std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
  return rad_to_deg(std::acos(d));
}

/// Unit-length direction. The constructor normalizes; a zero or non-finite
/// vector is rejected. Vectors already unit within 1e-12 are kept bit-exact
/// so that normalization is idempotent across serialization round trips.
class UnitDir {
 public:
  explicit UnitDir(const Vec3& v) {
    if (!v.allFinite()) {
      throw std::invalid_argument("UnitDir: non-finite components");
    }
    const double n = v.norm();
    if (n == 0.0) {
      throw std::invalid_argument("UnitDir: zero vector");
    }
    dir_ = std::abs(n - 1.0) <= 1e-12 ? v : Vec3(v / n);
  }
  UnitDir(double x, double y, double z) : UnitDir(Vec3(x, y, z)) {}

  const Vec3& vec() const { return dir_; }
  double x() const { return dir_.x(); }
  double y() const { return dir_.y(); }
  double z() const { return dir_.z(); }

 private:
  Vec3 dir_;
};

/// Rigid head pose: position in meters, unit rotation quaternion.
struct HeadPose {
  Vec3 position{Vec3::Zero()};
  Quat rotation{Quat::Identity()};

  static HeadPose identity() { return HeadPose{}; }

  /// 4x4 rigid transform (rotation + translation, no scale or shear).
  Mat4 to_matrix() const {
    Mat4 m = Mat4::Identity();
    m.template topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.template topRightCorner<3, 1>() = position;
    return m;
  }

  static HeadPose from_matrix(const Mat4& m) {
    const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
    if (std::abs(r.determinant() - 1.0) > 1e-6 ||
        (r * r.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-6) {
      throw std::invalid_argument("HeadPose: matrix is not a rigid transform");
    }
    HeadPose pose;
    pose.rotation = Quat(r).normalized();
    pose.position = m.topRightCorner<3, 1>();
    return pose;
  }
};

/// World-frame gaze ray: eye position plus unit gaze direction.
struct GazeRay {
  Vec3 origin{Vec3::Zero()};
  UnitDir direction{0.0, 0.0, 1.0};
};

/// Normalized screen coordinates. In-view points have u,v in [0,1];
/// gaze pointing away from the screen is flagged out-of-view with the
/// sentinel coordinates (-1,-1).
struct ScreenPoint {
  double u = 0.0;
  double v = 0.0;
  bool in_view = false;
};

/// The nine named regions of normalized screen space.
enum class ScreenZone {
  Left,
  Right,
  Center,
  TopLeft,
  TopRight,
  Top,
  BottomLeft,
  BottomRight,
  Bottom,
};

/// Virtual projection plane at `distance` meters along head-forward (+z),
/// spanning [-half_width, half_width] x [-half_height, half_height].
/// Defaults give roughly a 60-degree total field of view on both axes.
struct VirtualScreen {
  double distance = 1.0;
  double half_width = 0.5774;
  double half_height = 0.5774;
};

/// Builds the world-frame gaze ray from a head pose and a head-local gaze
/// direction. With an identity pose and zero eye offset this reduces to
/// origin = head position, direction = local gaze.
inline GazeRay world_gaze_ray(const HeadPose& head, const UnitDir& local_gaze,
                              const Vec3& local_eye_offset = Vec3::Zero()) {
  GazeRay ray{head.position + head.rotation * local_eye_offset,
              UnitDir(head.rotation * local_gaze.vec())};
  return ray;
}

/// Rotational change between two gaze directions, degrees in [0, 180].
inline double angular_change_deg(const UnitDir& prev, const UnitDir& cur) {
  const double d = std::clamp(prev.vec().dot(cur.vec()), -1.0, 1.0);
  return rad_to_deg(std::acos(d));
}

/// Angular speed in degrees/second from an angle change over an interval.
inline double angular_speed_deg(double delta_theta_deg, double delta_t_s) {
  if (!(delta_t_s > 0.0)) {
    throw std::invalid_argument("angular_speed_deg: interval must be positive");
  }
  return delta_theta_deg / delta_t_s;
}

/// First non-negative ray parameter at which the ray meets the solid sphere,
/// or nullopt on a miss. An origin inside the sphere hits at distance 0;
/// exact tangency counts as a hit.
inline std::optional<double> ray_sphere_hit(const GazeRay& ray,
                                            const Vec3& center, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ray_sphere_hit: radius must be positive");
  }
  const Vec3 oc = ray.origin - center;
  const double c = oc.squaredNorm() - radius * radius;
  if (c <= 0.0) {
    return 0.0;  // origin inside or on the sphere
  }
  const double b = oc.dot(ray.direction.vec());
  const double disc = b * b - c;
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) {
    return std::nullopt;
  }
  return t;
}

/// Projects a world gaze ray onto the head-attached virtual screen.
/// Gaze parallel to the plane or pointing backward yields an out-of-view
/// result rather than an error.
inline ScreenPoint project_to_screen(const GazeRay& ray, const HeadPose& head,
                                     const VirtualScreen& screen = {}) {
  const Quat inv = head.rotation.conjugate();
  const Vec3 local_origin = inv * (ray.origin - head.position);
  const Vec3 local_dir = inv * ray.direction.vec();
  if (!(local_dir.z() > 0.0)) {
    return ScreenPoint{-1.0, -1.0, false};
  }
  const double t = (screen.distance - local_origin.z()) / local_dir.z();
  if (t < 0.0) {
    return ScreenPoint{-1.0, -1.0, false};
  }
  const Vec3 hit = local_origin + t * local_dir;
  ScreenPoint p;
  p.u = (hit.x() / screen.half_width + 1.0) / 2.0;
  p.v = (hit.y() / screen.half_height + 1.0) / 2.0;
  p.in_view = p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0;
  return p;
}

/// Maps an in-view screen point to its zone. The partition is an equal-thirds
/// 3x3 grid with v measured upward; values exactly on 1/3 or 2/3 belong to
/// the center band.
inline ScreenZone classify_zone(const ScreenPoint& p) {
  if (!p.in_view) {
    throw std::domain_error("classify_zone: point is out of view");
  }
  const double lo = 1.0 / 3.0;
  const double hi = 2.0 / 3.0;
  const int col = p.u < lo ? 0 : (p.u > hi ? 2 : 1);
  const int row = p.v > hi ? 2 : (p.v < lo ? 0 : 1);
  static constexpr ScreenZone table[3][3] = {
      {ScreenZone::BottomLeft, ScreenZone::Bottom, ScreenZone::BottomRight},
      {ScreenZone::Left, ScreenZone::Center, ScreenZone::Right},
      {ScreenZone::TopLeft, ScreenZone::Top, ScreenZone::TopRight},
  };
  return table[row][col];
}

inline const char* to_string(ScreenZone zone) {
  switch (zone) {
    case ScreenZone::Left: return "Left";
    case ScreenZone::Right: return "Right";
    case ScreenZone::Center: return "Center";
    case ScreenZone::TopLeft: return "TopLeft";
    case ScreenZone::TopRight: return "TopRight";
    case ScreenZone::Top: return "Top";
    case ScreenZone::BottomLeft: return "BottomLeft";
    case ScreenZone::BottomRight: return "BottomRight";
    case ScreenZone::Bottom: return "Bottom";
  }
  throw std::logic_error("to_string: bad ScreenZone");
}

inline ScreenZone zone_from_string(const std::string& name) {
  for (ScreenZone z : {ScreenZone::Left, ScreenZone::Right, ScreenZone::Center,
                       ScreenZone::TopLeft, ScreenZone::TopRight,
                       ScreenZone::Top, ScreenZone::BottomLeft,
                       ScreenZone::BottomRight, ScreenZone::Bottom}) {
    if (name == to_string(z)) {
      return z;
    }
  }
  throw std::invalid_argument("unknown screen zone: " + name);
}

/// All nine zones in a fixed iteration order.
inline constexpr ScreenZone kAllZones[9] = {
    ScreenZone::Left,       ScreenZone::Right,    ScreenZone::Center,
    ScreenZone::TopLeft,    ScreenZone::TopRight, ScreenZone::Top,
    ScreenZone::BottomLeft, ScreenZone::BottomRight, ScreenZone::Bottom,
};

}  // namespace gazekit
