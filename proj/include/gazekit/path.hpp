#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "gazekit/geometry.hpp"

namespace gazekit {

struct LineSegment {
  Vec3 p0{Vec3::Zero()};
  Vec3 p1{Vec3::Zero()};
};

struct CubicBezierSegment {
  Vec3 p0{Vec3::Zero()};
  Vec3 c0{Vec3::Zero()};
  Vec3 c1{Vec3::Zero()};
  Vec3 p1{Vec3::Zero()};
};

using PathSegment = std::variant<LineSegment, CubicBezierSegment>;

Vec3 segment_start(const PathSegment& seg);
Vec3 segment_end(const PathSegment& seg);

/// Point on the segment at parameter t in [0,1]. Lines interpolate linearly;
/// cubic beziers are evaluated by de Casteljau subdivision.
Vec3 eval_segment(const PathSegment& seg, double t);

/// Ordered, C0-continuous sequence of segments the pursuit target travels.
struct Path {
  std::vector<PathSegment> segments;

  /// Throws std::invalid_argument when empty, degenerate, or not
  /// C0-continuous (joint mismatch above 1e-9 m).
  void validate() const;
};

/// Chordal arc-length samples per segment, used to invert distance to
/// parameter for constant-speed traversal.
struct ArcLengthTable {
  struct SegmentTable {
    std::vector<double> t;          // uniform parameter samples
    std::vector<double> cumulative; // chordal length from segment start
  };
  std::vector<SegmentTable> segments;
  std::vector<double> prefix_length; // total length before each segment
  double total_length = 0.0;
};

inline constexpr std::size_t kDefaultArcSamples = 256;

ArcLengthTable build_arc_length_table(const Path& path,
                                      std::size_t samples_per_segment = kDefaultArcSamples);

/// Point at arc distance s from the path start, s in [0, total_length].
/// Inverts the table with linear interpolation between samples.
Vec3 position_at_distance(const Path& path, const ArcLengthTable& table,
                          double s);

}  // namespace gazekit
