#include "gazekit/report.hpp"

#include <doctest.h>

#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/simulator.hpp"
#include "script_fixtures.hpp"

using namespace gazekit;
using testfix::full_battery;

namespace {

/// Minimal strict XML well-formedness check: balanced tags, quoted
/// attributes, legal entities, one root element. Fails loudly with a reason.
bool well_formed_xml(const std::string& s, std::string* why) {
  std::vector<std::string> stack;
  int roots = 0;
  std::size_t i = 0;
  const auto fail = [&](const std::string& message) {
    *why = message + " near byte " + std::to_string(i);
    return false;
  };
  const auto check_text = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
      if (s[k] == '&') {
        std::size_t e = k + 1;
        if (e < to && s[e] == '#') {
          ++e;
          while (e < to && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
        } else {
          while (e < to && std::isalpha(static_cast<unsigned char>(s[e]))) ++e;
        }
        if (e >= to || s[e] != ';' || e == k + 1) {
          return false;
        }
        k = e;
      }
    }
    return true;
  };

  while (i < s.size()) {
    const std::size_t lt = s.find('<', i);
    const std::size_t text_end = lt == std::string::npos ? s.size() : lt;
    if (!check_text(i, text_end)) {
      i = text_end;
      return fail("bad entity in text");
    }
    if (lt == std::string::npos) {
      break;
    }
    i = lt;
    if (s.compare(i, 4, "<!--") == 0) {
      const std::size_t end = s.find("-->", i);
      if (end == std::string::npos) return fail("unterminated comment");
      i = end + 3;
      continue;
    }
    if (s.compare(i, 2, "<!") == 0) {  // DOCTYPE and friends
      const std::size_t end = s.find('>', i);
      if (end == std::string::npos) return fail("unterminated declaration");
      i = end + 1;
      continue;
    }
    if (s.compare(i, 2, "</") == 0) {
      std::size_t e = i + 2;
      while (e < s.size() && (std::isalnum(static_cast<unsigned char>(s[e])) ||
                              s[e] == '-' || s[e] == ':')) {
        ++e;
      }
      const std::string name = s.substr(i + 2, e - (i + 2));
      while (e < s.size() && std::isspace(static_cast<unsigned char>(s[e]))) ++e;
      if (e >= s.size() || s[e] != '>') return fail("malformed close tag");
      if (stack.empty() || stack.back() != name) {
        return fail("mismatched close tag </" + name + ">");
      }
      stack.pop_back();
      i = e + 1;
      continue;
    }
    // Open tag.
    std::size_t e = i + 1;
    if (e >= s.size() || !std::isalpha(static_cast<unsigned char>(s[e]))) {
      return fail("bad tag start");
    }
    while (e < s.size() && (std::isalnum(static_cast<unsigned char>(s[e])) ||
                            s[e] == '-' || s[e] == ':')) {
      ++e;
    }
    const std::string name = s.substr(i + 1, e - (i + 1));
    bool self_closing = false;
    while (e < s.size()) {
      while (e < s.size() && std::isspace(static_cast<unsigned char>(s[e]))) ++e;
      if (e >= s.size()) return fail("unterminated tag");
      if (s[e] == '>') {
        ++e;
        break;
      }
      if (s[e] == '/') {
        if (e + 1 >= s.size() || s[e + 1] != '>') return fail("bad self-close");
        self_closing = true;
        e += 2;
        break;
      }
      if (!std::isalpha(static_cast<unsigned char>(s[e]))) {
        return fail("bad attribute in <" + name + ">");
      }
      while (e < s.size() && (std::isalnum(static_cast<unsigned char>(s[e])) ||
                              s[e] == '-' || s[e] == ':')) {
        ++e;
      }
      if (e >= s.size() || s[e] != '=') return fail("attribute without value");
      ++e;
      if (e >= s.size() || (s[e] != '"' && s[e] != '\'')) {
        return fail("unquoted attribute value");
      }
      const char quote = s[e];
      const std::size_t close = s.find(quote, e + 1);
      if (close == std::string::npos) return fail("unterminated attribute");
      if (!check_text(e + 1, close)) return fail("bad entity in attribute");
      e = close + 1;
    }
    if (!self_closing) {
      if (stack.empty()) ++roots;
      stack.push_back(name);
    } else if (stack.empty()) {
      ++roots;
    }
    i = e;
  }
  if (!stack.empty()) {
    *why = "unclosed <" + stack.back() + ">";
    return false;
  }
  if (roots != 1) {
    *why = "expected exactly one root element, saw " + std::to_string(roots);
    return false;
  }
  return true;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Generated {
  SessionRecord session;
  ProtocolResults results;
  OverallEvaluation eval;
  ReportDocument doc;
};

Generated generate_fixture() {
  Generated g;
  const TestScript script = full_battery();
  SimConfig cfg;
  cfg.seed = 21;
  g.session = simulate_session(script, GazerModel::noisy(1.2), cfg);
  g.results = analyze_session(g.session, script);
  g.eval = overall_evaluation(g.results, script.analysis);
  g.doc = generate_report(g.session, g.results, g.eval);
  return g;
}

}  // namespace

TEST_CASE("report generation is byte-deterministic") {
  const Generated g = generate_fixture();
  const ReportDocument again = generate_report(g.session, g.results, g.eval);
  CHECK(g.doc.html == again.html);
  CHECK(g.doc.summary_json == again.summary_json);
}

TEST_CASE("report HTML parses as strict XML") {
  const Generated g = generate_fixture();
  std::string why;
  const bool ok = well_formed_xml(g.doc.html, &why);
  if (!ok) {
    FAIL(why);
  }
  // The checker itself must reject malformed input.
  CHECK_FALSE(well_formed_xml("<a><b></a></b>", &why));
  CHECK_FALSE(well_formed_xml("<a foo=bar></a>", &why));
  CHECK_FALSE(well_formed_xml("<a>&nbsp</a>", &why));
}

TEST_CASE("summary numbers equal analyzer outputs exactly") {
  const Generated g = generate_fixture();
  const auto summary = nlohmann::json::parse(g.doc.summary_json);

  for (const auto& [name, zj] : summary["static"]["per_zone"].items()) {
    const GazeHoldStats& stats =
        g.results.static_gaze->per_zone.at(zone_from_string(name));
    CHECK(zj["accuracy"].get<double>() == stats.accuracy);
    CHECK(zj["offset_count"].get<int>() == stats.offset_count);
    CHECK(zj["offset_duration_ms"].get<std::int64_t>() ==
          stats.offset_duration_ms);
    CHECK(zj["total_duration_ms"].get<std::int64_t>() ==
          stats.total_duration_ms);
  }
  CHECK(summary["dynamic"]["mean_fit"].get<double>() ==
        g.results.dynamic_gaze->mean_fit);
  REQUIRE(summary["dynamic"]["fit_series"].size() ==
          g.results.dynamic_gaze->fit_series.size());
  for (std::size_t i = 0; i < g.results.dynamic_gaze->fit_series.size(); ++i) {
    CHECK(summary["dynamic"]["fit_series"][i][0].get<std::int64_t>() ==
          g.results.dynamic_gaze->fit_series[i].t_ms);
    CHECK(summary["dynamic"]["fit_series"][i][1].get<double>() ==
          g.results.dynamic_gaze->fit_series[i].fit);
  }
  for (const auto& [name, value] :
       summary["saccadic"]["per_zone_mean_reaction_ms"].items()) {
    CHECK(value.get<double>() ==
          g.results.saccadic->per_zone_mean_reaction_ms.at(
              zone_from_string(name)));
  }
  CHECK(summary["overall"]["total"].get<double>() == g.eval.total);
  CHECK(summary["general"]["overall_score"].get<double>() == g.eval.total);
}

TEST_CASE("every printed table value appears in the HTML as rendered") {
  const Generated g = generate_fixture();
  const auto summary = nlohmann::json::parse(g.doc.summary_json);
  for (const auto& [name, zj] : summary["static"]["per_zone"].items()) {
    CHECK(g.doc.html.find(fmt2(zj["accuracy"].get<double>())) !=
          std::string::npos);
  }
  CHECK(g.doc.html.find(fmt2(summary["overall"]["total"].get<double>())) !=
        std::string::npos);
  CHECK(g.doc.html.find(fmt2(summary["dynamic"]["mean_fit"].get<double>())) !=
        std::string::npos);
  CHECK(g.doc.html.find(summary["general"]["grade"].get<std::string>()) !=
        std::string::npos);
}

TEST_CASE("missing protocols render as not tested") {
  const Generated g = generate_fixture();
  ProtocolResults only_static;
  only_static.static_gaze = g.results.static_gaze;
  const OverallEvaluation eval = overall_evaluation(only_static);
  const ReportDocument doc = generate_report(g.session, only_static, eval);
  CHECK(doc.html.find("not tested") != std::string::npos);
  const auto summary = nlohmann::json::parse(doc.summary_json);
  CHECK_FALSE(summary.contains("dynamic"));
  CHECK_FALSE(summary.contains("saccadic"));
  std::string why;
  const bool ok = well_formed_xml(doc.html, &why);
  if (!ok) {
    FAIL(why);
  }
}

TEST_CASE("engagement scores show up when provided") {
  const Generated g = generate_fixture();
  EngagementScores scores;
  scores.cognitive = 7.0 / 3.0;
  scores.behavioral = 3.0;
  scores.affective = 3.8;
  const ReportDocument doc =
      generate_report(g.session, g.results, g.eval, scores);
  CHECK(doc.html.find("2.33") != std::string::npos);
  const auto summary = nlohmann::json::parse(doc.summary_json);
  CHECK(summary["engagement"]["cognitive"].get<double>() == 2.33);
}

TEST_CASE("special characters in metadata are escaped") {
  Generated g = generate_fixture();
  g.session.meta.name = "a<b & \"c\"";
  const ReportDocument doc = generate_report(g.session, g.results, g.eval);
  std::string why;
  const bool ok = well_formed_xml(doc.html, &why);
  if (!ok) {
    FAIL(why);
  }
  CHECK(doc.html.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
}
