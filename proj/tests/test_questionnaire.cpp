#include "gazekit/questionnaire.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

#include "gazekit/errors.hpp"

using namespace gazekit;

namespace {

QuestionnaireRecord record_with(const std::string& id,
                                std::array<int, 11> answers) {
  QuestionnaireRecord r;
  r.participant_id = id;
  r.age = 22;
  r.gender = "other";
  r.education = "undergraduate";
  r.answers = answers;
  return r;
}

/// Integer answer tuples consistent with the eight published mean rows.
std::vector<QuestionnaireRecord> cohort_of_eight() {
  return {
      record_with("p1", {4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4}),
      record_with("p2", {5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5}),
      record_with("p3", {2, 2, 3, 2, 2, 3, 4, 4, 4, 4, 3}),
      record_with("p4", {4, 4, 4, 4, 4, 5, 4, 4, 4, 4, 3}),
      record_with("p5", {2, 2, 3, 3, 3, 3, 2, 2, 2, 3, 3}),
      record_with("p6", {5, 5, 5, 4, 4, 4, 5, 5, 5, 4, 4}),
      record_with("p7", {4, 4, 5, 5, 5, 4, 5, 4, 4, 4, 5}),
      record_with("p8", {4, 4, 4, 3, 3, 3, 4, 4, 4, 4, 4}),
  };
}

struct Row {
  double cognitive, behavioral, affective;
};

constexpr Row kExpected[8] = {
    {4.00, 4.00, 4.00}, {5.00, 5.00, 5.00}, {2.33, 2.33, 3.80},
    {4.00, 4.33, 3.80}, {2.33, 3.00, 2.40}, {5.00, 4.00, 4.60},
    {4.33, 4.67, 4.40}, {4.00, 3.00, 4.00},
};

}  // namespace

TEST_CASE("uniform answer sheets score their value in every dimension") {
  const EngagementScores four =
      score(record_with("a", {4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4}));
  CHECK(round2(four.cognitive) == 4.00);
  CHECK(round2(four.behavioral) == 4.00);
  CHECK(round2(four.affective) == 4.00);

  const EngagementScores five =
      score(record_with("b", {5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5}));
  CHECK(round2(five.cognitive) == 5.00);
  CHECK(round2(five.behavioral) == 5.00);
  CHECK(round2(five.affective) == 5.00);
}

TEST_CASE("mixed sheet reproduces the 2.33 / 2.33 / 3.80 row") {
  const EngagementScores s =
      score(record_with("c", {2, 2, 3, 2, 2, 3, 4, 4, 4, 4, 3}));
  CHECK(round2(s.cognitive) == 2.33);
  CHECK(round2(s.behavioral) == 2.33);
  CHECK(round2(s.affective) == 3.80);
}

TEST_CASE("all eight reconstructed rows match at two decimals") {
  const auto records = cohort_of_eight();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const EngagementScores s = score(records[i]);
    CHECK(round2(s.cognitive) == kExpected[i].cognitive);
    CHECK(round2(s.behavioral) == kExpected[i].behavioral);
    CHECK(round2(s.affective) == kExpected[i].affective);
  }
}

TEST_CASE("cohort summary means are computed over unrounded values") {
  const CohortSummary summary = cohort_summary(cohort_of_eight());
  REQUIRE(summary.rows.size() == 8);
  // Independent arithmetic: sums of the reconstructed answer groups.
  const double cog = (12.0 + 15.0 + 7.0 + 12.0 + 7.0 + 15.0 + 13.0 + 12.0) / 3.0 / 8.0;
  const double beh = (12.0 + 15.0 + 7.0 + 13.0 + 9.0 + 12.0 + 14.0 + 9.0) / 3.0 / 8.0;
  const double aff = (20.0 + 25.0 + 19.0 + 19.0 + 12.0 + 23.0 + 22.0 + 20.0) / 5.0 / 8.0;
  CHECK(summary.cohort_means.cognitive == doctest::Approx(cog).epsilon(1e-12));
  CHECK(summary.cohort_means.behavioral == doctest::Approx(beh).epsilon(1e-12));
  CHECK(summary.cohort_means.affective == doctest::Approx(aff).epsilon(1e-12));
  CHECK(round2(summary.cohort_means.cognitive) == 3.88);
  CHECK(round2(summary.cohort_means.behavioral) == 3.79);
  CHECK(round2(summary.cohort_means.affective) == 4.00);
}

TEST_CASE("rows come back ordered by participant id") {
  auto records = cohort_of_eight();
  std::reverse(records.begin(), records.end());
  const CohortSummary summary = cohort_summary(records);
  CHECK(std::is_sorted(summary.rows.begin(), summary.rows.end(),
                       [](const CohortRow& a, const CohortRow& b) {
                         return a.participant_id < b.participant_id;
                       }));
}

TEST_CASE("single-record cohort equals that record") {
  const CohortSummary summary = cohort_summary({cohort_of_eight()[2]});
  CHECK(summary.cohort_means.cognitive ==
        doctest::Approx(summary.rows[0].scores.cognitive));
}

TEST_CASE("score is permutation-invariant within each index group") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> likert(1, 5);
  for (int i = 0; i < 200; ++i) {
    std::array<int, 11> answers;
    for (int& a : answers) {
      a = likert(rng);
    }
    const EngagementScores base = score(record_with("x", answers));
    std::array<int, 11> shuffled = answers;
    std::shuffle(shuffled.begin(), shuffled.begin() + 3, rng);
    std::shuffle(shuffled.begin() + 3, shuffled.begin() + 6, rng);
    std::shuffle(shuffled.begin() + 6, shuffled.end(), rng);
    const EngagementScores moved = score(record_with("x", shuffled));
    CHECK(base.cognitive == moved.cognitive);
    CHECK(base.behavioral == moved.behavioral);
    CHECK(base.affective == moved.affective);
    for (const double v :
         {base.cognitive, base.behavioral, base.affective}) {
      CHECK(v >= 1.0);
      CHECK(v <= 5.0);
    }
  }
}

TEST_CASE("rounding shifts each cohort contribution by at most 0.005") {
  const CohortSummary summary = cohort_summary(cohort_of_eight());
  double rounded_cog = 0.0;
  for (const CohortRow& row : summary.rows) {
    rounded_cog += round2(row.scores.cognitive);
    CHECK(std::abs(round2(row.scores.cognitive) - row.scores.cognitive) <=
          0.005);
  }
  rounded_cog /= static_cast<double>(summary.rows.size());
  CHECK(std::abs(rounded_cog - summary.cohort_means.cognitive) <= 0.005);
}

TEST_CASE("validation: bad answers and duplicate ids") {
  QuestionnaireRecord bad = cohort_of_eight()[0];
  bad.answers[4] = 6;
  CHECK_THROWS_AS(score(bad), ValidationError);

  auto dup = cohort_of_eight();
  dup[1].participant_id = dup[0].participant_id;
  CHECK_THROWS_AS(cohort_summary(dup), ValidationError);

  CHECK_THROWS_AS(cohort_summary({}), ValidationError);
}

TEST_CASE("parse_responses validates counts and ranges with field names") {
  const char* missing_one = R"({"responses":[{
    "participant_id":"p1","age":20,"gender":"g","education":"e",
    "answers":[4,4,4,4,4,4,4,4,4,4]}]})";
  try {
    parse_responses(missing_one);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("answers") != std::string::npos);
  }

  const char* out_of_range = R"({"responses":[{
    "participant_id":"p1","age":20,"gender":"g","education":"e",
    "answers":[4,4,4,4,4,0,4,4,4,4,4]}]})";
  try {
    parse_responses(out_of_range);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("answers[5]") != std::string::npos);
  }
}

TEST_CASE("serialize_scores emits rounded two-decimal values") {
  const std::string bytes = serialize_scores(cohort_summary(cohort_of_eight()));
  CHECK(bytes.find("2.33") != std::string::npos);
  CHECK(bytes.find("3.8") != std::string::npos);
  CHECK(bytes.find("\"cohort_means\"") != std::string::npos);
  CHECK(bytes.back() == '\n');
}
