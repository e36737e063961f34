#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string cli = GAZEKIT_CLI_PATH;
const fs::path fixtures = GAZEKIT_FIXTURES_DIR;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const fs::path& dir, const std::string& args) {
  const fs::path out_file = dir / "stdout.txt";
  const fs::path err_file = dir / "stderr.txt";
  const std::string cmd = cli + " " + args + " >" + out_file.string() + " 2>" +
                          err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gazekit_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate twice with the same seed writes identical files") {
  TempDir tmp;
  const std::string script = (fixtures / "scripts" / "full_battery.json").string();
  const std::string model = (fixtures / "models" / "ideal.json").string();

  const RunResult a = run(tmp.path,
                          "simulate --script " + script + " --model " + model +
                              " --seed 42 --out " + (tmp.path / "a.json").string());
  CHECK(a.exit_code == 0);
  CHECK(a.out.empty());
  const RunResult b = run(tmp.path,
                          "simulate --script " + script + " --model " + model +
                              " --seed 42 --out " + (tmp.path / "b.json").string());
  CHECK(b.exit_code == 0);
  CHECK(slurp(tmp.path / "a.json") == slurp(tmp.path / "b.json"));
  CHECK_FALSE(slurp(tmp.path / "a.json").empty());
}

TEST_CASE("the full pipeline runs and stays quiet on stdout") {
  TempDir tmp;
  const std::string script = (fixtures / "scripts" / "full_battery.json").string();
  const std::string model = (fixtures / "models" / "ideal.json").string();
  const std::string session = (tmp.path / "session.json").string();
  const std::string results = (tmp.path / "results.json").string();

  CHECK(run(tmp.path, "simulate --script " + script + " --model " + model +
                          " --seed 7 --out " + session)
            .exit_code == 0);
  const RunResult analyzed =
      run(tmp.path, "analyze --session " + session + " --script " + script +
                        " --out " + results);
  CHECK(analyzed.exit_code == 0);
  CHECK(analyzed.out.empty());

  const RunResult reported = run(
      tmp.path, "report --session " + session + " --results " + results +
                    " --out " + (tmp.path / "report.html").string() +
                    " --summary " + (tmp.path / "summary.json").string());
  CHECK(reported.exit_code == 0);
  CHECK(reported.out.empty());
  CHECK(slurp(tmp.path / "report.html").find("<html") != std::string::npos);
  CHECK_FALSE(slurp(tmp.path / "summary.json").empty());
}

TEST_CASE("analyze against a script with a missing phase names it") {
  TempDir tmp;
  const std::string small =
      (fixtures / "scripts" / "calibration_9zone.json").string();
  const std::string full = (fixtures / "scripts" / "full_battery.json").string();
  const std::string model = (fixtures / "models" / "ideal.json").string();
  const std::string session = (tmp.path / "session.json").string();

  CHECK(run(tmp.path, "simulate --script " + small + " --model " + model +
                          " --seed 1 --out " + session)
            .exit_code == 0);
  const RunResult bad =
      run(tmp.path, "analyze --session " + session + " --script " + full +
                        " --out " + (tmp.path / "r.json").string());
  CHECK(bad.exit_code == 1);
  CHECK(bad.out.empty());
  CHECK(bad.err.find("pursuit") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  TempDir tmp;
  CHECK(run(tmp.path, "frobnicate").exit_code == 2);
  CHECK(run(tmp.path, "simulate --script only.json").exit_code == 2);
  const RunResult r = run(tmp.path, "analyze --nope x");
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("score-questionnaire writes the cohort score file") {
  TempDir tmp;
  const std::string responses =
      (fixtures / "questionnaire" / "table1_reconstruction.json").string();
  const std::string out = (tmp.path / "scores.json").string();
  const RunResult r =
      run(tmp.path, "score-questionnaire --responses " + responses +
                        " --out " + out);
  CHECK(r.exit_code == 0);
  const std::string scores = slurp(out);
  CHECK(scores.find("2.33") != std::string::npos);
  CHECK(scores.find("cohort_means") != std::string::npos);
}

TEST_CASE("run-all produces all four artifacts deterministically") {
  TempDir tmp;
  const std::string script = (fixtures / "scripts" / "full_battery.json").string();
  const std::string model = (fixtures / "models" / "ideal.json").string();
  const std::string base =
      "run-all --script " + script + " --model " + model + " --seed 9";

  CHECK(run(tmp.path, base + " --out-dir " + (tmp.path / "one").string())
            .exit_code == 0);
  CHECK(run(tmp.path, base + " --out-dir " + (tmp.path / "two").string())
            .exit_code == 0);
  for (const char* name :
       {"session.json", "results.json", "report.html", "summary.json"}) {
    CHECK(slurp(tmp.path / "one" / name) == slurp(tmp.path / "two" / name));
    CHECK_FALSE(slurp(tmp.path / "one" / name).empty());
  }
  CHECK(slurp(tmp.path / "one" / "report.html").find("Excellent") !=
        std::string::npos);
}

TEST_CASE("corrupt session input exits 1 with a diagnostic") {
  TempDir tmp;
  const std::string script = (fixtures / "scripts" / "full_battery.json").string();
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << "{ not json";
  const RunResult r =
      run(tmp.path, "analyze --session " + bad.string() + " --script " +
                        script + " --out " + (tmp.path / "r.json").string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}
