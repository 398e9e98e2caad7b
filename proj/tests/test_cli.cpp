#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

// Runs the CLI with the given arguments, capturing stdout; stderr carries
// only diagnostics and is dropped.
RunResult run(const std::string& args) {
  std::string cmd = std::string(NPAM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, got);
  int rc = pclose(pipe);
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  result.code = WEXITSTATUS(rc);
  return result;
}

std::string data_file(const char* name) { return std::string(NPAM_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("help, version, and usage errors") {
  CHECK(run("--help").code == 0);
  RunResult version = run("--version");
  CHECK(version.code == 0);
  CHECK(version.out == "1.0.0\n");

  CHECK(run("").code == 2);
  CHECK(run("bogus-cmd").code == 2);
  CHECK(run("algebraic").code == 2);
  CHECK(run("solve --scenario chsh --unknown-flag").code == 2);
  CHECK(run("algebraic --scenario chsh --level 1+QQ").code == 2);
  CHECK(run("algebraic --scenario chsh --convention bogus").code == 2);
}

TEST_CASE("algebraic counts match the reference column") {
  RunResult chsh = run("algebraic --scenario chsh --level 3");
  CHECK(chsh.code == 0);
  CHECK(chsh.out == "classes=61\n");

  RunResult shorthand = run("algebraic --scenario 2,3:2,2 --level 3");
  CHECK(shorthand.code == 0);
  CHECK(shorthand.out == "classes=319\n");

  RunResult trivial = run("algebraic --scenario 3322 --level 0");
  CHECK(trivial.code == 0);
  CHECK(trivial.out == "classes=1\n");
}

TEST_CASE("scenario arguments accept aliases, shorthand, and files") {
  std::string path = "/tmp/npam_cli_scenario.txt";
  {
    std::ofstream out(path);
    out << "# two parties, two dichotomic settings each\n";
    out << "2 2\n";
    out << "2 2\n";
  }
  RunResult from_file = run("algebraic --scenario " + path + " --level 3");
  CHECK(from_file.code == 0);
  CHECK(from_file.out == "classes=61\n");

  CHECK(run("algebraic --scenario /tmp/npam_cli_missing_scenario.txt").code == 3);

  {
    std::ofstream out(path);
    out << "2 nonsense\n";
  }
  CHECK(run("algebraic --scenario " + path).code == 2);
  std::remove(path.c_str());
}

TEST_CASE("sampling reproduces the algebraic classes and is deterministic") {
  RunResult sampled = run("sample-constraints --scenario chsh --level 3 --rank 2 --seed 1");
  CHECK(sampled.code == 0);
  CHECK(sampled.out == "classes=61\n");

  RunResult rank1 = run("sample-constraints --scenario 3322 --level 3 --rank 1 --seed 1");
  CHECK(rank1.code == 0);
  CHECK(rank1.out == "classes=808\n");

  std::string doc1 = "/tmp/npam_cli_doc1.txt";
  std::string doc2 = "/tmp/npam_cli_doc2.txt";
  std::string flags = "sample-constraints --scenario chsh --level 2 --rank 2 --seed 7 --out ";
  CHECK(run(flags + doc1).code == 0);
  CHECK(run(flags + doc2).code == 0);
  std::string text = slurp(doc1);
  CHECK(text == slurp(doc2));
  CHECK(text.rfind("npam-constraints v1\n", 0) == 0);
  CHECK(text.find("scenario 2,2;2,2\n") != std::string::npos);
  CHECK(text.find("level 2\n") != std::string::npos);

  CHECK(run(flags + doc1 + " --format structured").code == 0);
  nlohmann::json doc = nlohmann::json::parse(slurp(doc1));
  CHECK(doc["schema"] == "npam-constraints");
  CHECK(doc["level"] == "2");
  CHECK(doc["class_of"].size() == doc["basis"].size());

  std::remove(doc1.c_str());
  std::remove(doc2.c_str());
}

TEST_CASE("compare reports coarsening under rank-1 sampling") {
  RunResult equal = run("compare --scenario chsh --level 3 --rank 1 --seed 1");
  CHECK(equal.code == 0);
  CHECK(equal.out.find("equal=yes\n") != std::string::npos);
  CHECK(equal.out.find("merges=0\n") != std::string::npos);
  CHECK(equal.out.find("splits=0\n") != std::string::npos);

  RunResult merged = run("compare --scenario 3322 --level 3 --rank 1 --seed 1 --format structured");
  CHECK(merged.code == 0);
  nlohmann::json doc = nlohmann::json::parse(merged.out);
  CHECK(doc["classes_sampled"] == 808);
  CHECK(doc["classes_algebraic"] == 868);
  CHECK(doc["equal"] == false);
  CHECK(doc["refinement"] == true);
  CHECK(doc["splits"] == 0);
}

TEST_CASE("table1 emits the ten reference rows") {
  RunResult table = run("table1 --seed 1");
  CHECK(table.code == 0);
  std::vector<std::string> lines = lines_of(table.out);
  REQUIRE(lines.size() == 11);
  CHECK(lines[0].find("algebraic") != std::string::npos);
  CHECK(lines[1] == "  2  2  2  2         61         61         61");
  CHECK(lines[10] == "  3  3  3  3      38017      38017      36721");

  RunResult structured = run("table1 --seed 1 --format structured");
  CHECK(structured.code == 0);
  nlohmann::json rows = nlohmann::json::parse(structured.out);
  REQUIRE(rows.size() == 10);
  CHECK(rows[7]["algebraic"] == 868);
  CHECK(rows[7]["rank1"] == 808);
  CHECK(rows[7]["rank2_matches_algebraic"] == true);
}

TEST_CASE("solve reaches the CHSH bound and handles the zero functional") {
  RunResult chsh = run("solve --scenario chsh --level 1+AB --functional " + data_file("chsh.func"));
  CHECK(chsh.code == 0);
  std::vector<std::string> lines = lines_of(chsh.out);
  REQUIRE(lines.size() == 2);
  REQUIRE(lines[0].rfind("value=", 0) == 0);
  CHECK(std::abs(std::stod(lines[0].substr(6)) - 2.0 * std::sqrt(2.0)) <= 1e-4);
  CHECK(lines[1] == "status=optimal");

  RunResult zero = run("solve --scenario chsh --level 1+AB --format structured");
  CHECK(zero.code == 0);
  nlohmann::json doc = nlohmann::json::parse(zero.out);
  CHECK(std::abs(doc["value"].get<double>()) <= 1e-6);
  CHECK(doc["status"] == "optimal");

  RunResult sampled = run("solve --scenario chsh --level 1+AB --sampled --rank 2 --seed 1 "
                          "--functional " + data_file("chsh.func"));
  CHECK(sampled.code == 0);
  std::vector<std::string> sampled_lines = lines_of(sampled.out);
  REQUIRE(sampled_lines.size() == 2);
  CHECK(std::abs(std::stod(sampled_lines[0].substr(6)) - 2.0 * std::sqrt(2.0)) <= 1e-4);

  CHECK(run("solve --scenario chsh --functional /tmp/npam_cli_missing.func").code == 3);
}

TEST_CASE("SDPA export writes deterministic files") {
  std::string path1 = "/tmp/npam_cli_export1.dat-s";
  std::string path2 = "/tmp/npam_cli_export2.dat-s";
  std::string flags = "export-sdpa --scenario chsh --level 1+AB --functional " +
                      data_file("chsh.func") + " --out ";
  RunResult first = run(flags + path1);
  CHECK(first.code == 0);
  CHECK(first.out.empty());
  CHECK(run(flags + path2).code == 0);
  std::string text = slurp(path1);
  CHECK(text == slurp(path2));
  CHECK(text.rfind("*", 0) == 0);

  RunResult with_solve = run("solve --scenario chsh --level 1+AB --functional " +
                             data_file("chsh.func") + " --export-sdpa " + path1);
  CHECK(with_solve.code == 0);
  CHECK(with_solve.out.find("status=optimal") != std::string::npos);
  CHECK(slurp(path1) == text);

  CHECK(run("export-sdpa --scenario chsh --level 1+AB").code == 2);
  std::remove(path1.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("experiment runs bundled files and flags failures") {
  RunResult control = run("experiment " + data_file("homogeneous-control.spec"));
  CHECK(control.code == 0);
  std::vector<std::string> lines = lines_of(control.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].find("EQ") != std::string::npos);
  CHECK(lines[2].find("EQ") != std::string::npos);

  RunResult structured =
      run("experiment " + data_file("homogeneous-control.spec") + " --format structured");
  CHECK(structured.code == 0);
  nlohmann::json rows = nlohmann::json::parse(structured.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["control"] == true);
  CHECK(rows[0]["result"] == "EQ");
  CHECK(rows[0]["runs_done"] == 1000);
  CHECK(rows[0]["equalities_found"] == 1000);
  CHECK(rows[1]["dim"] == 5);

  std::string path = "/tmp/npam_cli_fail.spec";
  {
    std::ofstream out(path);
    out << "5 5 2 1 3 10 1e3 1\n";
  }
  RunResult fail = run("experiment " + path);
  CHECK(fail.code == 5);
  CHECK(fail.out.find("FAIL") != std::string::npos);

  {
    std::ofstream out(path);
    out << "5 5 2 1\n";
  }
  CHECK(run("experiment " + path).code == 2);
  CHECK(run("experiment /tmp/npam_cli_missing.spec").code == 3);
  std::remove(path.c_str());
}
