#include "gazekit/questionnaire.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gazekit/json_io.hpp"

namespace gazekit {

using jsonio::json;

double round2(double value) {
  return std::floor(value * 100.0 + 0.5) / 100.0;
}

namespace {

double group_mean(const std::array<int, kQuestionCount>& answers, int first,
                  int last) {
  double sum = 0.0;
  for (int i = first; i <= last; ++i) {
    sum += static_cast<double>(answers[static_cast<std::size_t>(i)]);
  }
  return sum / static_cast<double>(last - first + 1);
}

}  // namespace

EngagementScores score(const QuestionnaireRecord& record) {
  for (int i = 0; i < kQuestionCount; ++i) {
    const int a = record.answers[static_cast<std::size_t>(i)];
    if (a < 1 || a > 5) {
      throw ValidationError("answer " + std::to_string(i + 1) + " for \"" +
                            record.participant_id + "\" is outside 1..5");
    }
  }
  EngagementScores s;
  s.cognitive = group_mean(record.answers, 0, 2);
  s.behavioral = group_mean(record.answers, 3, 5);
  s.affective = group_mean(record.answers, 6, 10);
  return s;
}

CohortSummary cohort_summary(const std::vector<QuestionnaireRecord>& records) {
  if (records.empty()) {
    throw ValidationError("cohort_summary: no records");
  }
  std::set<std::string> ids;
  CohortSummary summary;
  for (const QuestionnaireRecord& r : records) {
    if (!ids.insert(r.participant_id).second) {
      throw ValidationError("duplicate participant_id \"" + r.participant_id +
                            "\"");
    }
    summary.rows.push_back(CohortRow{r.participant_id, score(r)});
  }
  std::sort(summary.rows.begin(), summary.rows.end(),
            [](const CohortRow& a, const CohortRow& b) {
              return a.participant_id < b.participant_id;
            });
  const double n = static_cast<double>(summary.rows.size());
  for (const CohortRow& row : summary.rows) {
    summary.cohort_means.cognitive += row.scores.cognitive / n;
    summary.cohort_means.behavioral += row.scores.behavioral / n;
    summary.cohort_means.affective += row.scores.affective / n;
  }
  return summary;
}

std::vector<QuestionnaireRecord> parse_responses(const std::string& bytes) {
  json j = jsonio::parse_json(bytes);
  const json& responses = jsonio::as_array(
      jsonio::member(j, "responses", "responses"), "responses");
  std::vector<QuestionnaireRecord> records;
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const std::string at = "responses[" + std::to_string(i) + "]";
    const json& rj = responses[i];
    QuestionnaireRecord r;
    r.participant_id = jsonio::as_string(
        jsonio::member(rj, "participant_id", at), at + ".participant_id");
    r.age = static_cast<int>(
        jsonio::as_integer(jsonio::member(rj, "age", at), at + ".age"));
    r.gender =
        jsonio::as_string(jsonio::member(rj, "gender", at), at + ".gender");
    r.education = jsonio::as_string(jsonio::member(rj, "education", at),
                                    at + ".education");
    const json& answers = jsonio::as_array(
        jsonio::member(rj, "answers", at), at + ".answers");
    if (answers.size() != kQuestionCount) {
      jsonio::fail(at + ".answers",
                   "expected exactly " + std::to_string(kQuestionCount) +
                       " answers, got " + std::to_string(answers.size()));
    }
    for (std::size_t k = 0; k < answers.size(); ++k) {
      const std::string aat = at + ".answers[" + std::to_string(k) + "]";
      const std::int64_t v = jsonio::as_integer(answers[k], aat);
      if (v < 1 || v > 5) {
        jsonio::fail(aat, "answer outside the 1..5 scale");
      }
      r.answers[k] = static_cast<int>(v);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string serialize_scores(const CohortSummary& summary) {
  json participants = json::array();
  for (const CohortRow& row : summary.rows) {
    participants.push_back(json{
        {"participant_id", row.participant_id},
        {"cognitive", round2(row.scores.cognitive)},
        {"behavioral", round2(row.scores.behavioral)},
        {"affective", round2(row.scores.affective)},
    });
  }
  const json doc{
      {"schema_version", 1},
      {"participants", std::move(participants)},
      {"cohort_means",
       {{"cognitive", round2(summary.cohort_means.cognitive)},
        {"behavioral", round2(summary.cohort_means.behavioral)},
        {"affective", round2(summary.cohort_means.affective)}}},
  };
  return jsonio::canonical_dump(doc);
}

}  // namespace gazekit
