#pragma once

#include <array>
#include <string>
#include <vector>

namespace gazekit {

inline constexpr int kQuestionCount = 11;

/// One participant's answers: 11 Likert items, each 1..5.
/// Items 1-3 measure cognitive, 4-6 behavioral, 7-11 affective engagement.
struct QuestionnaireRecord {
  std::string participant_id;
  int age = 0;
  std::string gender;
  std::string education;
  std::array<int, kQuestionCount> answers{};
};

struct EngagementScores {
  double cognitive = 0.0;
  double behavioral = 0.0;
  double affective = 0.0;
};

/// Rounds half-up to two decimals, the precision engagement means are
/// reported at.
double round2(double value);

/// Per-dimension means over the fixed item groups (unrounded; use round2
/// for display). Throws ValidationError naming the offending answer index.
EngagementScores score(const QuestionnaireRecord& record);

struct CohortRow {
  std::string participant_id;
  EngagementScores scores;
};

struct CohortSummary {
  std::vector<CohortRow> rows;       // ordered by participant_id
  EngagementScores cohort_means;     // computed over unrounded row means
};

CohortSummary cohort_summary(const std::vector<QuestionnaireRecord>& records);

/// Reads {"responses": [...]} and validates every record.
std::vector<QuestionnaireRecord> parse_responses(const std::string& bytes);

/// Canonical scores file: per-participant and cohort means rounded to the
/// reported two decimals.
std::string serialize_scores(const CohortSummary& summary);

}  // namespace gazekit
