#pragma once

#include <optional>
#include <string>

#include "gazekit/evaluation.hpp"
#include "gazekit/protocols.hpp"
#include "gazekit/questionnaire.hpp"
#include "gazekit/session.hpp"

namespace gazekit {

/// Self-contained assessment report: one XHTML document with inline SVG
/// charts plus a machine-readable summary carrying every charted number.
/// Byte-deterministic for identical inputs.
struct ReportDocument {
  std::string html;
  std::string summary_json;
};

ReportDocument generate_report(const SessionRecord& session,
                               const ProtocolResults& results,
                               const OverallEvaluation& eval,
                               const std::optional<EngagementScores>& scores =
                                   std::nullopt);

}  // namespace gazekit
