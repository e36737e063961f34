#include "gazekit/path.hpp"

#include <algorithm>
#include <stdexcept>

namespace gazekit {

namespace {

Vec3 de_casteljau(const CubicBezierSegment& b, double t) {
  const Vec3 a0 = b.p0 + t * (b.c0 - b.p0);
  const Vec3 a1 = b.c0 + t * (b.c1 - b.c0);
  const Vec3 a2 = b.c1 + t * (b.p1 - b.c1);
  const Vec3 b0 = a0 + t * (a1 - a0);
  const Vec3 b1 = a1 + t * (a2 - a1);
  return b0 + t * (b1 - b0);
}

double control_polygon_length(const CubicBezierSegment& b) {
  return (b.c0 - b.p0).norm() + (b.c1 - b.c0).norm() + (b.p1 - b.c1).norm();
}

}  // namespace

Vec3 segment_start(const PathSegment& seg) {
  return std::visit([](const auto& s) { return s.p0; }, seg);
}

Vec3 segment_end(const PathSegment& seg) {
  return std::visit([](const auto& s) { return s.p1; }, seg);
}

Vec3 eval_segment(const PathSegment& seg, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("eval_segment: t outside [0,1]");
  }
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    return line->p0 + t * (line->p1 - line->p0);
  }
  return de_casteljau(std::get<CubicBezierSegment>(seg), t);
}

void Path::validate() const {
  if (segments.empty()) {
    throw std::invalid_argument("Path: no segments");
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (const auto* line = std::get_if<LineSegment>(&segments[i])) {
      if ((line->p1 - line->p0).norm() == 0.0) {
        throw std::invalid_argument("Path: degenerate line segment");
      }
    } else {
      const auto& bez = std::get<CubicBezierSegment>(segments[i]);
      if (control_polygon_length(bez) == 0.0) {
        throw std::invalid_argument("Path: degenerate bezier segment");
      }
    }
    if (i > 0 &&
        (segment_start(segments[i]) - segment_end(segments[i - 1])).norm() >
            1e-9) {
      throw std::invalid_argument("Path: segments are not C0-continuous");
    }
  }
}

ArcLengthTable build_arc_length_table(const Path& path,
                                      std::size_t samples_per_segment) {
  if (samples_per_segment < 2) {
    throw std::invalid_argument(
        "build_arc_length_table: need at least 2 samples per segment");
  }
  path.validate();
  ArcLengthTable table;
  table.segments.reserve(path.segments.size());
  double running = 0.0;
  for (const PathSegment& seg : path.segments) {
    ArcLengthTable::SegmentTable st;
    st.t.reserve(samples_per_segment);
    st.cumulative.reserve(samples_per_segment);
    Vec3 prev = segment_start(seg);
    double length = 0.0;
    for (std::size_t i = 0; i < samples_per_segment; ++i) {
      const double t =
          static_cast<double>(i) / static_cast<double>(samples_per_segment - 1);
      const Vec3 p = eval_segment(seg, t);
      length += (p - prev).norm();
      st.t.push_back(t);
      st.cumulative.push_back(length);
      prev = p;
    }
    table.prefix_length.push_back(running);
    running += length;
    table.segments.push_back(std::move(st));
  }
  table.total_length = running;
  return table;
}

Vec3 position_at_distance(const Path& path, const ArcLengthTable& table,
                          double s) {
  if (!(s >= 0.0 && s <= table.total_length)) {
    throw std::domain_error("position_at_distance: s outside [0, total]");
  }
  if (path.segments.size() != table.segments.size()) {
    throw std::invalid_argument("position_at_distance: table/path mismatch");
  }
  // Locate the segment holding s, then invert its cumulative samples.
  std::size_t idx = path.segments.size() - 1;
  for (std::size_t i = 0; i + 1 < path.segments.size(); ++i) {
    if (s < table.prefix_length[i + 1]) {
      idx = i;
      break;
    }
  }
  const auto& st = table.segments[idx];
  const double local = std::min(s - table.prefix_length[idx], st.cumulative.back());
  const auto it =
      std::lower_bound(st.cumulative.begin(), st.cumulative.end(), local);
  std::size_t hi = static_cast<std::size_t>(it - st.cumulative.begin());
  if (hi == 0) {
    return eval_segment(path.segments[idx], st.t.front());
  }
  hi = std::min(hi, st.cumulative.size() - 1);
  const std::size_t lo = hi - 1;
  const double span = st.cumulative[hi] - st.cumulative[lo];
  const double frac = span > 0.0 ? (local - st.cumulative[lo]) / span : 0.0;
  const double t = st.t[lo] + frac * (st.t[hi] - st.t[lo]);
  return eval_segment(path.segments[idx], t);
}

}  // namespace gazekit
