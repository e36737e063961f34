#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gazekit/errors.hpp"
#include "gazekit/evaluation.hpp"
#include "gazekit/protocols.hpp"
#include "gazekit/questionnaire.hpp"
#include "gazekit/report.hpp"
#include "gazekit/session.hpp"
#include "gazekit/simulator.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw gazekit::ValidationError("cannot open file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw gazekit::ValidationError("cannot open file for writing: " + path);
  }
  out << bytes;
  if (!out) {
    throw gazekit::ValidationError("failed writing file: " + path);
  }
}

/// Parses a file's bytes, prefixing any diagnostic with the file name.
template <typename Parser>
auto load(const std::string& path, Parser&& parser) {
  try {
    return parser(read_file(path));
  } catch (const gazekit::ValidationError& e) {
    throw gazekit::ValidationError(path + ": " + e.what());
  }
}

struct SimulateArgs {
  std::string script_path;
  std::string model_path;
  std::optional<std::int64_t> seed;
  std::string out_path;
};

gazekit::SessionRecord run_simulation(const SimulateArgs& args) {
  const gazekit::TestScript script =
      load(args.script_path, [](const std::string& b) { return gazekit::parse_script(b); });
  gazekit::GazerSpec spec = load(args.model_path, [](const std::string& b) { return gazekit::parse_gazer_spec(b); });
  if (args.seed) {
    spec.sim.seed = *args.seed;
  }
  return gazekit::simulate_session(script, spec.model, spec.sim);
}

/// Picks the engagement row for the session's participant, falling back to
/// the first row of the responses file.
std::optional<gazekit::EngagementScores> scores_for(
    const std::string& responses_path, const std::string& participant) {
  const auto records = load(responses_path, [](const std::string& b) { return gazekit::parse_responses(b); });
  const gazekit::CohortSummary summary = gazekit::cohort_summary(records);
  for (const gazekit::CohortRow& row : summary.rows) {
    if (row.participant_id == participant) {
      return row.scores;
    }
  }
  return summary.rows.empty() ? std::nullopt
                              : std::make_optional(summary.rows.front().scores);
}

int dispatch(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gazekit::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const gazekit::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gazekit: simulate, analyze, and report VR gaze sessions"};
  app.require_subcommand(1);

  // simulate
  auto sim_args = std::make_shared<SimulateArgs>();
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run a gazer model against a test script");
  simulate->add_option("--script", sim_args->script_path, "Test script JSON")
      ->required();
  simulate->add_option("--model", sim_args->model_path, "Gazer model JSON")
      ->required();
  std::int64_t seed_value = 0;
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_value, "Simulation seed");
  simulate->add_option("--out", sim_args->out_path, "Output session JSON")
      ->required();
  simulate->callback([sim_args, seed_opt, &seed_value] {
    if (seed_opt->count() > 0) {
      sim_args->seed = seed_value;
    }
    const gazekit::SessionRecord session = run_simulation(*sim_args);
    write_file(sim_args->out_path, gazekit::serialize_session(session));
  });

  // analyze
  auto analyze_session_path = std::make_shared<std::string>();
  auto analyze_script_path = std::make_shared<std::string>();
  auto analyze_out_path = std::make_shared<std::string>();
  CLI::App* analyze =
      app.add_subcommand("analyze", "Run the protocol analyzers on a session");
  analyze->add_option("--session", *analyze_session_path, "Session JSON")
      ->required();
  analyze->add_option("--script", *analyze_script_path, "Test script JSON")
      ->required();
  analyze->add_option("--out", *analyze_out_path, "Output results JSON")
      ->required();
  analyze->callback([analyze_session_path, analyze_script_path,
                     analyze_out_path] {
    const gazekit::SessionRecord session =
        load(*analyze_session_path, [](const std::string& b) { return gazekit::parse_session(b); });
    const gazekit::TestScript script =
        load(*analyze_script_path, [](const std::string& b) { return gazekit::parse_script(b); });
    const gazekit::ProtocolResults results =
        gazekit::analyze_session(session, script);
    write_file(*analyze_out_path, gazekit::serialize_results(results));
  });

  // report
  auto report_session_path = std::make_shared<std::string>();
  auto report_results_path = std::make_shared<std::string>();
  auto report_script_path = std::make_shared<std::string>();
  auto report_out_path = std::make_shared<std::string>();
  auto report_summary_path = std::make_shared<std::string>();
  auto report_scores_path = std::make_shared<std::string>();
  CLI::App* report =
      app.add_subcommand("report", "Generate the HTML assessment report");
  report->add_option("--session", *report_session_path, "Session JSON")
      ->required();
  report->add_option("--results", *report_results_path, "Results JSON")
      ->required();
  report->add_option("--out", *report_out_path, "Output HTML file")->required();
  report->add_option("--summary", *report_summary_path,
                     "Optional machine-readable summary JSON");
  report->add_option("--script", *report_script_path,
                     "Optional script JSON (for analysis weights)");
  report->add_option("--scores", *report_scores_path,
                     "Optional questionnaire responses JSON");
  report->callback([report_session_path, report_results_path,
                    report_script_path, report_out_path, report_summary_path,
                    report_scores_path] {
    const gazekit::SessionRecord session =
        load(*report_session_path, [](const std::string& b) { return gazekit::parse_session(b); });
    const gazekit::ProtocolResults results =
        load(*report_results_path, [](const std::string& b) { return gazekit::parse_results(b); });
    gazekit::AnalysisConfig analysis;
    if (!report_script_path->empty()) {
      analysis = load(*report_script_path, [](const std::string& b) { return gazekit::parse_script(b); }).analysis;
    }
    const gazekit::OverallEvaluation eval =
        gazekit::overall_evaluation(results, analysis);
    std::optional<gazekit::EngagementScores> scores;
    if (!report_scores_path->empty()) {
      scores = scores_for(*report_scores_path, session.meta.name);
    }
    const gazekit::ReportDocument doc =
        gazekit::generate_report(session, results, eval, scores);
    write_file(*report_out_path, doc.html);
    if (!report_summary_path->empty()) {
      write_file(*report_summary_path, doc.summary_json);
    }
  });

  // score-questionnaire
  auto responses_path = std::make_shared<std::string>();
  auto scores_out_path = std::make_shared<std::string>();
  CLI::App* score_cmd = app.add_subcommand(
      "score-questionnaire", "Score engagement questionnaire responses");
  score_cmd->add_option("--responses", *responses_path, "Responses JSON")
      ->required();
  score_cmd->add_option("--out", *scores_out_path, "Output scores JSON")
      ->required();
  score_cmd->callback([responses_path, scores_out_path] {
    const auto records = load(*responses_path, [](const std::string& b) { return gazekit::parse_responses(b); });
    write_file(*scores_out_path,
               gazekit::serialize_scores(gazekit::cohort_summary(records)));
  });

  // run-all
  auto all_args = std::make_shared<SimulateArgs>();
  auto all_out_dir = std::make_shared<std::string>();
  auto all_responses = std::make_shared<std::string>();
  CLI::App* run_all = app.add_subcommand(
      "run-all", "simulate, analyze, and report in one step");
  run_all->add_option("--script", all_args->script_path, "Test script JSON")
      ->required();
  run_all->add_option("--model", all_args->model_path, "Gazer model JSON")
      ->required();
  std::int64_t all_seed_value = 0;
  CLI::Option* all_seed_opt =
      run_all->add_option("--seed", all_seed_value, "Simulation seed");
  run_all->add_option("--out-dir", *all_out_dir, "Output directory")
      ->required();
  run_all->add_option("--responses", *all_responses,
                      "Optional questionnaire responses JSON");
  run_all->callback([all_args, all_seed_opt, &all_seed_value, all_out_dir,
                     all_responses] {
    if (all_seed_opt->count() > 0) {
      all_args->seed = all_seed_value;
    }
    fs::create_directories(*all_out_dir);
    const gazekit::TestScript script =
        load(all_args->script_path, [](const std::string& b) { return gazekit::parse_script(b); });
    const gazekit::SessionRecord session = run_simulation(*all_args);
    const gazekit::ProtocolResults results =
        gazekit::analyze_session(session, script);
    const gazekit::OverallEvaluation eval =
        gazekit::overall_evaluation(results, script.analysis);

    std::optional<gazekit::EngagementScores> scores;
    if (!all_responses->empty()) {
      const auto records = load(*all_responses, [](const std::string& b) { return gazekit::parse_responses(b); });
      const gazekit::CohortSummary summary = gazekit::cohort_summary(records);
      write_file((fs::path(*all_out_dir) / "scores.json").string(),
                 gazekit::serialize_scores(summary));
      scores = scores_for(*all_responses, session.meta.name);
    }
    const gazekit::ReportDocument doc =
        gazekit::generate_report(session, results, eval, scores);

    write_file((fs::path(*all_out_dir) / "session.json").string(),
               gazekit::serialize_session(session));
    write_file((fs::path(*all_out_dir) / "results.json").string(),
               gazekit::serialize_results(results));
    write_file((fs::path(*all_out_dir) / "report.html").string(), doc.html);
    write_file((fs::path(*all_out_dir) / "summary.json").string(),
               doc.summary_json);
  });

  return dispatch(app, argc, argv);
}
