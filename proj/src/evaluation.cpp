#include "gazekit/evaluation.hpp"

#include <algorithm>

#include "gazekit/errors.hpp"

namespace gazekit {

const char* to_string(Grade grade) {
  switch (grade) {
    case Grade::Excellent: return "Excellent";
    case Grade::Good: return "Good";
    case Grade::Fair: return "Fair";
    case Grade::Poor: return "Poor";
  }
  throw std::logic_error("to_string: bad Grade");
}

OverallEvaluation overall_evaluation(const ProtocolResults& results,
                                     const AnalysisConfig& analysis) {
  OverallEvaluation eval;

  if (results.static_gaze && !results.static_gaze->per_point.empty()) {
    double sum = 0.0;
    for (const StaticPointResult& p : results.static_gaze->per_point) {
      sum += p.acquired ? p.stats.accuracy : 0.0;
    }
    eval.static_score =
        100.0 * sum / static_cast<double>(results.static_gaze->per_point.size());
  }
  if (results.dynamic_gaze && !results.dynamic_gaze->fit_series.empty()) {
    eval.dynamic_score = 100.0 * results.dynamic_gaze->mean_fit;
  }
  if (results.saccadic && !results.saccadic->events.empty()) {
    double sum = 0.0;
    int acquired = 0;
    for (const SaccadicResultEntry& e : results.saccadic->events) {
      if (e.reaction_ms) {
        sum += static_cast<double>(*e.reaction_ms);
        ++acquired;
      }
    }
    if (acquired == 0) {
      eval.saccadic_score = 0.0;  // every stimulus missed
    } else {
      const double mean_rt = sum / static_cast<double>(acquired);
      const double span = analysis.rt_zero_ms - analysis.rt_full_marks_ms;
      eval.saccadic_score =
          100.0 * std::clamp((analysis.rt_zero_ms - mean_rt) / span, 0.0, 1.0);
    }
  }

  double weight_sum = 0.0;
  double weighted = 0.0;
  if (eval.static_score) {
    weight_sum += analysis.weight_static;
    weighted += analysis.weight_static * *eval.static_score;
  }
  if (eval.dynamic_score) {
    weight_sum += analysis.weight_dynamic;
    weighted += analysis.weight_dynamic * *eval.dynamic_score;
  }
  if (eval.saccadic_score) {
    weight_sum += analysis.weight_saccadic;
    weighted += analysis.weight_saccadic * *eval.saccadic_score;
  }
  if (weight_sum <= 0.0) {
    throw ValidationError("overall_evaluation: no protocol results");
  }
  eval.total = weighted / weight_sum;

  if (eval.total >= analysis.grade_excellent) {
    eval.grade = Grade::Excellent;
  } else if (eval.total >= analysis.grade_good) {
    eval.grade = Grade::Good;
  } else if (eval.total >= analysis.grade_fair) {
    eval.grade = Grade::Fair;
  } else {
    eval.grade = Grade::Poor;
  }
  return eval;
}

}  // namespace gazekit
