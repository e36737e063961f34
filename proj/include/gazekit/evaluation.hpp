#pragma once

#include <optional>
#include <string>

#include "gazekit/protocols.hpp"
#include "gazekit/script.hpp"

namespace gazekit {

enum class Grade { Excellent, Good, Fair, Poor };

const char* to_string(Grade grade);

/// Aggregate 0-100 scores per protocol plus their weighted total. Missing
/// protocols drop out and the remaining weights renormalize.
struct OverallEvaluation {
  std::optional<double> static_score;
  std::optional<double> dynamic_score;
  std::optional<double> saccadic_score;
  double total = 0.0;
  Grade grade = Grade::Poor;
};

/// static: mean per-point accuracy (a never-acquired point scores 0);
/// dynamic: mean pursuit fit; saccadic: mean reaction time mapped linearly
/// from rt_full_marks_ms (100) to rt_zero_ms (0). Grade boundaries are
/// closed from above. Throws ValidationError when no protocol is present.
OverallEvaluation overall_evaluation(const ProtocolResults& results,
                                     const AnalysisConfig& analysis = {});

}  // namespace gazekit
