#include "gazekit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

namespace {

// Report palette (speed trace green, stimulus markers red).
constexpr const char* kGreen = "#2e8b57";
constexpr const char* kRed = "#cc3333";
constexpr const char* kBlue = "#4477aa";
constexpr const char* kOrange = "#d98032";
constexpr const char* kGrid = "#cccccc";

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt1(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

std::string fmt_ms(double v) {
  return std::to_string(std::llround(v));
}

std::string escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Bar {
  std::string label;
  double value = 0.0;
  std::string text;  // printed above the bar
};

/// Fixed-size bar chart; bar value text is the only numeric labeling.
std::string bar_chart(const std::string& title, const std::vector<Bar>& bars,
                      double y_max, const char* color) {
  constexpr double width = 640.0, height = 220.0;
  constexpr double left = 30.0, bottom = 40.0, top = 30.0;
  const double plot_w = width - 2 * left;
  const double plot_h = height - bottom - top;
  if (y_max <= 0.0) {
    y_max = 1.0;
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"220\" viewBox=\"0 0 640 220\">";
  svg << "<text x=\"320\" y=\"18\" text-anchor=\"middle\" class=\"ct\">"
      << escape(title) << "</text>";
  svg << "<line x1=\"" << fmt1(left) << "\" y1=\"" << fmt1(height - bottom)
      << "\" x2=\"" << fmt1(width - left) << "\" y2=\"" << fmt1(height - bottom)
      << "\" stroke=\"" << kGrid << "\"/>";
  const double slot = plot_w / static_cast<double>(std::max<std::size_t>(bars.size(), 1));
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const Bar& bar = bars[i];
    const double h = plot_h * std::clamp(bar.value / y_max, 0.0, 1.0);
    const double x = left + slot * static_cast<double>(i) + slot * 0.2;
    const double y = height - bottom - h;
    svg << "<rect x=\"" << fmt1(x) << "\" y=\"" << fmt1(y) << "\" width=\""
        << fmt1(slot * 0.6) << "\" height=\"" << fmt1(h) << "\" fill=\"" << color
        << "\"/>";
    svg << "<text x=\"" << fmt1(x + slot * 0.3) << "\" y=\"" << fmt1(y - 4.0)
        << "\" text-anchor=\"middle\" class=\"cv\">" << escape(bar.text)
        << "</text>";
    svg << "<text x=\"" << fmt1(x + slot * 0.3) << "\" y=\""
        << fmt1(height - bottom + 16.0) << "\" text-anchor=\"middle\" class=\"cl\">"
        << escape(bar.label) << "</text>";
  }
  svg << "</svg>";
  return svg.str();
}

struct LinePoint {
  double t = 0.0;
  double v = 0.0;
};

/// Fixed-size line chart with optional vertical event markers. Y tick labels
/// come from `y_ticks`; x labels are the first and last sample times.
std::string line_chart(const std::string& title,
                       const std::vector<LinePoint>& points, double y_min,
                       double y_max, const std::vector<double>& y_ticks,
                       const char* color, const std::vector<double>& markers) {
  constexpr double width = 640.0, height = 240.0;
  constexpr double left = 48.0, right = 16.0, bottom = 34.0, top = 28.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double t0 = points.empty() ? 0.0 : points.front().t;
  const double t1 = points.empty() ? 1.0 : points.back().t;
  const double t_span = t1 > t0 ? t1 - t0 : 1.0;
  const double y_span = y_max > y_min ? y_max - y_min : 1.0;
  const auto px = [&](double t) { return left + plot_w * (t - t0) / t_span; };
  const auto py = [&](double v) {
    return top + plot_h * (1.0 - std::clamp((v - y_min) / y_span, 0.0, 1.0));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"240\" viewBox=\"0 0 640 240\">";
  svg << "<text x=\"320\" y=\"18\" text-anchor=\"middle\" class=\"ct\">"
      << escape(title) << "</text>";
  for (const double tick : y_ticks) {
    const double y = py(tick);
    svg << "<line x1=\"" << fmt1(left) << "\" y1=\"" << fmt1(y) << "\" x2=\""
        << fmt1(width - right) << "\" y2=\"" << fmt1(y) << "\" stroke=\"" << kGrid
        << "\"/>";
    svg << "<text x=\"" << fmt1(left - 6.0) << "\" y=\"" << fmt1(y + 4.0)
        << "\" text-anchor=\"end\" class=\"cl\">" << fmt2(tick) << "</text>";
  }
  for (const double m : markers) {
    svg << "<line x1=\"" << fmt1(px(m)) << "\" y1=\"" << fmt1(top) << "\" x2=\""
        << fmt1(px(m)) << "\" y2=\"" << fmt1(height - bottom) << "\" stroke=\""
        << kRed << "\" stroke-width=\"1.5\"/>";
    svg << "<circle cx=\"" << fmt1(px(m)) << "\" cy=\"" << fmt1(top)
        << "\" r=\"3\" fill=\"" << kRed << "\"/>";
  }
  if (!points.empty()) {
    svg << "<path fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" d=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      svg << (i == 0 ? "M" : "L") << fmt1(px(points[i].t)) << " "
          << fmt1(py(points[i].v));
    }
    svg << "\"/>";
    svg << "<text x=\"" << fmt1(left) << "\" y=\"" << fmt1(height - 12.0)
        << "\" class=\"cl\">" << fmt_ms(t0) << " ms</text>";
    svg << "<text x=\"" << fmt1(width - right) << "\" y=\""
        << fmt1(height - 12.0) << "\" text-anchor=\"end\" class=\"cl\">"
        << fmt_ms(t1) << " ms</text>";
  }
  svg << "</svg>";
  return svg.str();
}

std::string stats_row(const std::string& label, const GazeHoldStats& s,
                      const std::optional<double>& mean_rt) {
  std::ostringstream row;
  row << "<tr><td>" << escape(label) << "</td><td>" << fmt2(s.accuracy)
      << "</td><td>" << s.offset_count << "</td><td>" << s.offset_duration_ms
      << "</td><td>" << s.total_duration_ms << "</td><td>"
      << (mean_rt ? fmt_ms(*mean_rt) : std::string("&#8212;")) << "</td></tr>";
  return row.str();
}

const char* kStatsHeader =
    "<tr><th>Zone</th><th>Accuracy</th><th>Offsets</th>"
    "<th>Offset ms</th><th>Total ms</th><th>Mean RT ms</th></tr>";

json stats_summary(const GazeHoldStats& s) {
  return json{{"accuracy", s.accuracy},
              {"offset_count", s.offset_count},
              {"offset_duration_ms", s.offset_duration_ms},
              {"total_duration_ms", s.total_duration_ms}};
}

}  // namespace

ReportDocument generate_report(const SessionRecord& session,
                               const ProtocolResults& results,
                               const OverallEvaluation& eval,
                               const std::optional<EngagementScores>& scores) {
  json summary{{"schema_version", 1}};
  json axes{{"unit_ticks", json::array({0.0, 0.5, 1.0})}};

  std::ostringstream body;
  body << "<h1>Gaze Session Assessment</h1>";

  // --- General information ---------------------------------------------
  body << "<section id=\"general\"><h2>General Information</h2><table>";
  body << "<tr><th>Name</th><td>" << escape(session.meta.name) << "</td></tr>";
  body << "<tr><th>Age</th><td>" << session.meta.age << "</td></tr>";
  body << "<tr><th>Gender</th><td>" << escape(session.meta.gender)
       << "</td></tr>";
  body << "<tr><th>Device</th><td>" << escape(session.meta.device)
       << "</td></tr>";
  body << "<tr><th>Overall test score</th><td>" << fmt2(eval.total)
       << "</td></tr>";
  body << "<tr><th>Grade</th><td>" << to_string(eval.grade) << "</td></tr>";
  summary["general"] = json{{"name", session.meta.name},
                            {"age", session.meta.age},
                            {"gender", session.meta.gender},
                            {"device", session.meta.device},
                            {"overall_score", eval.total},
                            {"grade", to_string(eval.grade)}};
  if (scores) {
    body << "<tr><th>Cognitive engagement</th><td>"
         << fmt2(round2(scores->cognitive)) << "</td></tr>"
         << "<tr><th>Behavioral engagement</th><td>"
         << fmt2(round2(scores->behavioral)) << "</td></tr>"
         << "<tr><th>Affective engagement</th><td>"
         << fmt2(round2(scores->affective)) << "</td></tr>";
    summary["engagement"] = json{{"cognitive", round2(scores->cognitive)},
                                 {"behavioral", round2(scores->behavioral)},
                                 {"affective", round2(scores->affective)}};
  }
  body << "</table></section>";

  // --- Static gaze -------------------------------------------------------
  body << "<section id=\"static\"><h2>Static Gaze</h2>";
  if (results.static_gaze) {
    const StaticResults& r = *results.static_gaze;
    body << "<table>" << kStatsHeader;
    std::vector<Bar> acc_bars, off_bars;
    json zones = json::object();
    double max_offsets = 0.0;
    for (const auto& [zone, stats] : r.per_zone) {
      std::optional<double> rt;
      const auto it = r.per_zone_mean_reaction_ms.find(zone);
      if (it != r.per_zone_mean_reaction_ms.end()) {
        rt = it->second;
      }
      body << stats_row(to_string(zone), stats, rt);
      acc_bars.push_back(Bar{to_string(zone), stats.accuracy, fmt2(stats.accuracy)});
      off_bars.push_back(Bar{to_string(zone),
                             static_cast<double>(stats.offset_count),
                             std::to_string(stats.offset_count)});
      max_offsets = std::max(max_offsets, static_cast<double>(stats.offset_count));
      json zj = stats_summary(stats);
      if (rt) {
        zj["mean_reaction_ms"] = *rt;
      }
      zones[to_string(zone)] = std::move(zj);
    }
    body << "</table>";
    body << bar_chart("Static gaze accuracy by zone", acc_bars, 1.0, kBlue);
    body << bar_chart("Static gaze offset count by zone", off_bars,
                      std::max(max_offsets, 1.0), kOrange);

    json per_point = json::array();
    for (const StaticPointResult& p : r.per_point) {
      json pj = stats_summary(p.stats);
      pj["point_id"] = p.point_id;
      pj["zone"] = to_string(p.zone);
      pj["acquired"] = p.acquired;
      if (p.reaction_ms) {
        pj["reaction_ms"] = *p.reaction_ms;
      }
      per_point.push_back(std::move(pj));
    }
    summary["static"] =
        json{{"per_zone", std::move(zones)}, {"per_point", std::move(per_point)}};
  } else {
    body << "<p class=\"nt\">not tested</p>";
  }
  body << "</section>";

  // --- Dynamic gaze ------------------------------------------------------
  body << "<section id=\"dynamic\"><h2>Dynamic Gaze</h2>";
  if (results.dynamic_gaze) {
    const DynamicResults& r = *results.dynamic_gaze;
    std::vector<LinePoint> fit_points;
    json fit_series = json::array();
    for (const FitSample& s : r.fit_series) {
      fit_points.push_back(LinePoint{static_cast<double>(s.t_ms), s.fit});
      fit_series.push_back(json::array({s.t_ms, s.fit}));
    }
    body << "<p>Mean fit degree: " << fmt2(r.mean_fit) << "</p>";
    body << line_chart("Pursuit fit degree", fit_points, 0.0, 1.0,
                       {0.0, 0.5, 1.0}, kBlue, {});
    body << "<table>" << kStatsHeader;
    body << stats_row("Overall", r.overall, std::nullopt);
    std::vector<Bar> acc_bars, off_bars;
    json zones = json::object();
    double max_offsets = 0.0;
    for (const auto& [zone, stats] : r.per_zone) {
      body << stats_row(to_string(zone), stats, std::nullopt);
      acc_bars.push_back(Bar{to_string(zone), stats.accuracy, fmt2(stats.accuracy)});
      off_bars.push_back(Bar{to_string(zone),
                             static_cast<double>(stats.offset_count),
                             std::to_string(stats.offset_count)});
      max_offsets = std::max(max_offsets, static_cast<double>(stats.offset_count));
      zones[to_string(zone)] = stats_summary(stats);
    }
    body << "</table>";
    body << bar_chart("Dynamic gaze accuracy by zone", acc_bars, 1.0, kBlue);
    body << bar_chart("Dynamic gaze offset count by zone", off_bars,
                      std::max(max_offsets, 1.0), kOrange);
    summary["dynamic"] = json{{"mean_fit", r.mean_fit},
                              {"overall", stats_summary(r.overall)},
                              {"per_zone", std::move(zones)},
                              {"fit_series", std::move(fit_series)}};
  } else {
    body << "<p class=\"nt\">not tested</p>";
  }
  body << "</section>";

  // --- Saccadic ----------------------------------------------------------
  body << "<section id=\"saccadic\"><h2>Saccadic</h2>";
  if (results.saccadic) {
    const SaccadicResults& r = *results.saccadic;

    std::map<std::string, std::int64_t> onsets;
    for (const StimulusEvent& e : session.events) {
      onsets[e.event_id] = e.onset_ms;
    }
    std::vector<LinePoint> speed_points;
    json speed_trace = json::array();
    double speed_max = 0.0;
    for (const SaccadicResultEntry& e : r.events) {
      for (const SpeedSample& s : e.trace) {
        speed_points.push_back(
            LinePoint{static_cast<double>(s.t_ms), s.speed_deg_per_s});
        speed_trace.push_back(json::array({s.t_ms, s.speed_deg_per_s}));
        speed_max = std::max(speed_max, s.speed_deg_per_s);
      }
    }
    std::sort(speed_points.begin(), speed_points.end(),
              [](const LinePoint& a, const LinePoint& b) { return a.t < b.t; });
    std::vector<double> markers;
    json onset_list = json::array();
    for (const SaccadicResultEntry& e : r.events) {
      const auto it = onsets.find(e.event_id);
      if (it != onsets.end()) {
        markers.push_back(static_cast<double>(it->second));
        onset_list.push_back(it->second);
      }
    }
    const double y_max = speed_max > 0.0 ? speed_max : 1.0;
    body << line_chart("Eye movement speed (deg/s), stimulus onsets in red",
                       speed_points, 0.0, y_max, {0.0, y_max}, kGreen, markers);

    body << "<table><tr><th>Event</th><th>Zone</th><th>Reaction ms</th></tr>";
    json events = json::array();
    for (const SaccadicResultEntry& e : r.events) {
      body << "<tr><td>" << escape(e.event_id) << "</td><td>"
           << to_string(e.zone) << "</td><td>"
           << (e.reaction_ms ? std::to_string(*e.reaction_ms)
                             : std::string("timed out"))
           << "</td></tr>";
      json ej{{"event_id", e.event_id},
              {"zone", to_string(e.zone)},
              {"timed_out", e.timed_out}};
      if (e.reaction_ms) {
        ej["reaction_ms"] = *e.reaction_ms;
      }
      events.push_back(std::move(ej));
    }
    body << "</table>";
    body << "<table><tr><th>Zone</th><th>Mean RT ms</th></tr>";
    json per_zone = json::object();
    for (const auto& [zone, mean] : r.per_zone_mean_reaction_ms) {
      body << "<tr><td>" << to_string(zone) << "</td><td>" << fmt_ms(mean)
           << "</td></tr>";
      per_zone[to_string(zone)] = mean;
    }
    body << "</table>";
    body << "<p>Timed out: " << r.timed_out_count << "</p>";
    summary["saccadic"] = json{{"events", std::move(events)},
                               {"per_zone_mean_reaction_ms", std::move(per_zone)},
                               {"timed_out_count", r.timed_out_count},
                               {"speed_trace", std::move(speed_trace)},
                               {"stimulus_onsets_ms", std::move(onset_list)}};
    axes["speed_max"] = y_max;
  } else {
    body << "<p class=\"nt\">not tested</p>";
  }
  body << "</section>";

  // --- Overall evaluation -------------------------------------------------
  body << "<section id=\"overall\"><h2>Overall Evaluation</h2><table>";
  json overall{{"total", eval.total}, {"grade", to_string(eval.grade)}};
  const auto score_row = [&](const char* label, const char* key,
                             const std::optional<double>& value) {
    body << "<tr><th>" << label << "</th><td>"
         << (value ? fmt2(*value) : std::string("not tested")) << "</td></tr>";
    if (value) {
      overall[key] = *value;
    }
  };
  score_row("Static score", "static_score", eval.static_score);
  score_row("Dynamic score", "dynamic_score", eval.dynamic_score);
  score_row("Saccadic score", "saccadic_score", eval.saccadic_score);
  body << "<tr><th>Total</th><td>" << fmt2(eval.total) << "</td></tr>";
  body << "<tr><th>Grade</th><td>" << to_string(eval.grade) << "</td></tr>";
  body << "</table></section>";
  summary["overall"] = std::move(overall);
  summary["axes"] = std::move(axes);

  ReportDocument doc;
  std::ostringstream html;
  html << "<!DOCTYPE html>\n"
       << "<html xmlns=\"http://www.w3.org/1999/xhtml\"><head>"
       << "<meta charset=\"utf-8\"/><title>Gaze Session Assessment</title>"
       << "<style>body{font-family:sans-serif;max-width:720px;margin:2em auto;}"
          "table{border-collapse:collapse;margin:0.8em 0;}"
          "td,th{border:1px solid #999;padding:0.25em 0.6em;text-align:left;}"
          ".ct{font-size:14px;}.cl{font-size:11px;fill:#444;}"
          ".cv{font-size:11px;}.nt{color:#777;font-style:italic;}"
          "svg{display:block;margin:0.6em 0;}</style>"
       << "</head><body>" << body.str() << "</body></html>\n";
  doc.html = html.str();
  doc.summary_json = jsonio::canonical_dump(summary);
  return doc;
}

}  // namespace gazekit
