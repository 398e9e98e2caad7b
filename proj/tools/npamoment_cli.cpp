#include <CLI11.hpp>
#include <json.hpp>
#include <npamoment.h>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

// Carries the mapped process exit code out of command handlers.
struct CliError {
  int code;
  std::string message;
};

int exit_code_of(npam_status status) {
  switch (status) {
    case NPAM_OK: return 0;
    case NPAM_ERR_INVALID_ARGUMENT: return 2;
    case NPAM_ERR_IO: return 3;
    case NPAM_ERR_SOLVER: return 4;
    case NPAM_ERR_INFEASIBLE_SPEC: return 5;
    case NPAM_ERR_INTERNAL: break;
  }
  return 1;
}

void check(npam_status status) {
  if (status != NPAM_OK) throw CliError{exit_code_of(status), npam_last_error()};
}

template <typename T, void (*Free)(T*)>
struct Owned {
  T* ptr = nullptr;
  Owned() = default;
  Owned(const Owned&) = delete;
  Owned& operator=(const Owned&) = delete;
  ~Owned() { Free(ptr); }
  T** operator&() { return &ptr; }
  operator T*() const { return ptr; }
};

using ScenarioHandle = Owned<npam_scenario, npam_scenario_free>;
using BasisHandle = Owned<npam_basis, npam_basis_free>;
using PartitionHandle = Owned<npam_partition, npam_partition_free>;
using FunctionalHandle = Owned<npam_functional, npam_functional_free>;
using SdpHandle = Owned<npam_sdp, npam_sdp_free>;
using ExperimentsHandle = Owned<npam_experiments, npam_experiments_free>;

bool parse_quad(const std::string& text, int quad[4]) {
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%d,%d:%d,%d%n", &quad[0], &quad[1], &quad[2], &quad[3],
                  &consumed) != 4)
    return false;
  return consumed == static_cast<int>(text.size());
}

// One line per party listing the outcome counts of its settings; '#' starts
// a comment.
void load_scenario_file(const std::string& path, ScenarioHandle& out) {
  std::ifstream in(path);
  if (!in) throw CliError{3, "cannot open scenario file: " + path};
  std::vector<int> settings;
  std::vector<int> outcomes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<int> party;
    int n = 0;
    while (fields >> n) party.push_back(n);
    if (!fields.eof())
      throw CliError{2, path + ":" + std::to_string(line_no) + ": expected outcome counts"};
    if (party.empty()) continue;
    settings.push_back(static_cast<int>(party.size()));
    outcomes.insert(outcomes.end(), party.begin(), party.end());
  }
  if (settings.empty()) throw CliError{2, "scenario file lists no parties: " + path};
  check(npam_scenario_general(static_cast<int>(settings.size()), settings.data(), outcomes.data(),
                              &out));
}

// Accepts the aliases "chsh" and "3322", the two-party shorthand "X,Y:A,B"
// (settings for each party, then outcomes per setting), or a file path.
void load_scenario(const std::string& arg, ScenarioHandle& out) {
  int quad[4];
  if (arg == "chsh") {
    check(npam_scenario_two_party(2, 2, 2, 2, &out));
  } else if (arg == "3322") {
    check(npam_scenario_two_party(3, 3, 2, 2, &out));
  } else if (parse_quad(arg, quad)) {
    check(npam_scenario_two_party(quad[0], quad[1], quad[2], quad[3], &out));
  } else {
    load_scenario_file(arg, out);
  }
}

struct CommonOpts {
  std::string scenario;
  std::string level = "3";
  int rank = 2;
  int samples = 2;
  uint64_t seed = 1;
  double tol_eq = 0.0;
  double tol_zero = 0.0;
  std::string out;
  std::string format = "text";
  std::string convention;
};

npam_format format_of(const CommonOpts& opts) {
  return opts.format == "structured" ? NPAM_FORMAT_STRUCTURED : NPAM_FORMAT_TEXT;
}

const char* convention_arg(const CommonOpts& opts) {
  return opts.convention.empty() ? nullptr : opts.convention.c_str();
}

void print_classes(const npam_partition* partition, const CommonOpts& opts) {
  int64_t count = 0;
  check(npam_partition_count(partition, convention_arg(opts), &count));
  std::printf("classes=%lld\n", static_cast<long long>(count));
}

void maybe_write_document(const npam_partition* partition, const npam_basis* basis,
                          const CommonOpts& opts) {
  if (opts.out.empty()) return;
  check(npam_partition_write(partition, basis, format_of(opts), convention_arg(opts),
                             opts.out.c_str()));
  std::fprintf(stderr, "wrote %s\n", opts.out.c_str());
}

int cmd_sample_constraints(const CommonOpts& opts) {
  ScenarioHandle scenario;
  load_scenario(opts.scenario, scenario);
  BasisHandle basis;
  check(npam_basis_create(scenario, opts.level.c_str(), &basis));
  PartitionHandle partition;
  check(npam_partition_sample(basis, opts.rank, opts.samples, opts.seed, opts.tol_eq,
                              opts.tol_zero, &partition));
  print_classes(partition, opts);
  maybe_write_document(partition, basis, opts);
  return 0;
}

int cmd_algebraic(const CommonOpts& opts) {
  ScenarioHandle scenario;
  load_scenario(opts.scenario, scenario);
  BasisHandle basis;
  check(npam_basis_create(scenario, opts.level.c_str(), &basis));
  PartitionHandle partition;
  check(npam_partition_algebraic(basis, &partition));
  print_classes(partition, opts);
  maybe_write_document(partition, basis, opts);
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  ScenarioHandle scenario;
  load_scenario(opts.scenario, scenario);
  BasisHandle basis;
  check(npam_basis_create(scenario, opts.level.c_str(), &basis));
  PartitionHandle algebraic;
  check(npam_partition_algebraic(basis, &algebraic));
  PartitionHandle sampled;
  check(npam_partition_sample(basis, opts.rank, opts.samples, opts.seed, opts.tol_eq,
                              opts.tol_zero, &sampled));
  int64_t count_sampled = 0, count_algebraic = 0, merges = 0, splits = 0;
  int equal = 0, refinement = 0;
  check(npam_partition_count(sampled, convention_arg(opts), &count_sampled));
  check(npam_partition_count(algebraic, convention_arg(opts), &count_algebraic));
  check(npam_partition_compare(sampled, algebraic, &merges, &splits, &equal, &refinement));
  if (format_of(opts) == NPAM_FORMAT_STRUCTURED) {
    nlohmann::ordered_json doc;
    doc["classes_sampled"] = count_sampled;
    doc["classes_algebraic"] = count_algebraic;
    doc["merges"] = merges;
    doc["splits"] = splits;
    doc["equal"] = equal != 0;
    doc["refinement"] = refinement != 0;
    std::printf("%s\n", doc.dump().c_str());
  } else {
    std::printf("classes-sampled=%lld\n", static_cast<long long>(count_sampled));
    std::printf("classes-algebraic=%lld\n", static_cast<long long>(count_algebraic));
    std::printf("merges=%lld\n", static_cast<long long>(merges));
    std::printf("splits=%lld\n", static_cast<long long>(splits));
    std::printf("equal=%s\n", equal ? "yes" : "no");
    std::printf("refinement=%s\n", refinement ? "yes" : "no");
  }
  return 0;
}

int cmd_table1(const CommonOpts& opts) {
  static const int rows[10][4] = {{2, 2, 2, 2}, {2, 2, 2, 3}, {2, 2, 3, 3}, {2, 3, 2, 2},
                                  {2, 3, 2, 3}, {2, 3, 3, 2}, {2, 3, 3, 3}, {3, 3, 2, 2},
                                  {3, 3, 3, 2}, {3, 3, 3, 3}};
  bool mismatch = false;
  nlohmann::ordered_json structured = nlohmann::ordered_json::array();
  if (format_of(opts) == NPAM_FORMAT_TEXT)
    std::printf("  X  Y  A  B  algebraic     rank-2     rank-1\n");
  for (const int* row : rows) {
    ScenarioHandle scenario;
    check(npam_scenario_two_party(row[0], row[1], row[2], row[3], &scenario));
    BasisHandle basis;
    check(npam_basis_create(scenario, "3", &basis));
    PartitionHandle algebraic;
    check(npam_partition_algebraic(basis, &algebraic));
    PartitionHandle rank2;
    check(npam_partition_sample(basis, 2, opts.samples, opts.seed, opts.tol_eq, opts.tol_zero,
                                &rank2));
    PartitionHandle rank1;
    check(npam_partition_sample(basis, 1, opts.samples, opts.seed, opts.tol_eq, opts.tol_zero,
                                &rank1));
    int64_t count_algebraic = 0, count_rank2 = 0, count_rank1 = 0;
    check(npam_partition_count(algebraic, convention_arg(opts), &count_algebraic));
    check(npam_partition_count(rank2, convention_arg(opts), &count_rank2));
    check(npam_partition_count(rank1, convention_arg(opts), &count_rank1));
    int equal = 0;
    check(npam_partition_compare(rank2, algebraic, nullptr, nullptr, &equal, nullptr));
    if (!equal) mismatch = true;
    if (format_of(opts) == NPAM_FORMAT_STRUCTURED) {
      nlohmann::ordered_json entry;
      entry["x"] = row[0];
      entry["y"] = row[1];
      entry["a"] = row[2];
      entry["b"] = row[3];
      entry["algebraic"] = count_algebraic;
      entry["rank2"] = count_rank2;
      entry["rank1"] = count_rank1;
      entry["rank2_matches_algebraic"] = equal != 0;
      structured.push_back(std::move(entry));
    } else {
      std::printf("%3d %2d %2d %2d %10lld %10lld %10lld\n", row[0], row[1], row[2], row[3],
                  static_cast<long long>(count_algebraic), static_cast<long long>(count_rank2),
                  static_cast<long long>(count_rank1));
    }
  }
  if (format_of(opts) == NPAM_FORMAT_STRUCTURED) std::printf("%s\n", structured.dump().c_str());
  if (mismatch) std::fprintf(stderr, "rank-2 sampling deviated from the algebraic classes\n");
  return mismatch ? 1 : 0;
}

const char* solve_status_name(int status) {
  switch (status) {
    case NPAM_SOLVE_OPTIMAL: return "optimal";
    case NPAM_SOLVE_INFEASIBLE: return "infeasible";
    case NPAM_SOLVE_MAX_ITERATIONS: return "max-iterations";
  }
  return "unknown";
}

struct SolveOpts {
  CommonOpts common;
  std::string functional;
  std::string export_path;
  bool sampled = false;
  bool export_only = false;
};

int cmd_solve(const SolveOpts& opts) {
  ScenarioHandle scenario;
  load_scenario(opts.common.scenario, scenario);
  BasisHandle basis;
  check(npam_basis_create(scenario, opts.common.level.c_str(), &basis));
  PartitionHandle partition;
  if (opts.sampled) {
    check(npam_partition_sample(basis, opts.common.rank, opts.common.samples, opts.common.seed,
                                opts.common.tol_eq, opts.common.tol_zero, &partition));
  } else {
    check(npam_partition_algebraic(basis, &partition));
  }
  FunctionalHandle functional;
  if (opts.functional.empty()) {
    check(npam_functional_zero(scenario, &functional));
  } else {
    check(npam_functional_load(scenario, opts.functional.c_str(), &functional));
  }
  SdpHandle sdp;
  check(npam_sdp_assemble(partition, basis, functional, &sdp));
  if (!opts.export_path.empty()) {
    check(npam_sdp_export(sdp, opts.export_path.c_str()));
    std::fprintf(stderr, "wrote %s\n", opts.export_path.c_str());
  }
  if (opts.export_only) return 0;
  int status = -1, iterations = 0;
  double value = 0.0, gap = 0.0;
  check(npam_sdp_solve(sdp, 0, 0, &status, &value, &gap, &iterations));
  if (format_of(opts.common) == NPAM_FORMAT_STRUCTURED) {
    nlohmann::ordered_json doc;
    doc["value"] = value;
    doc["status"] = solve_status_name(status);
    doc["gap"] = gap;
    doc["iterations"] = iterations;
    std::printf("%s\n", doc.dump().c_str());
  } else {
    std::printf("value=%.9g\n", value);
    std::printf("status=%s\n", solve_status_name(status));
  }
  std::fprintf(stderr, "gap=%.3e iterations=%d\n", gap, iterations);
  return status == NPAM_SOLVE_OPTIMAL ? 0 : 4;
}

struct ExperimentOpts {
  std::string spec_path;
  std::string format = "text";
};

int cmd_experiment(const ExperimentOpts& opts) {
  ExperimentsHandle rows;
  check(npam_experiments_load(opts.spec_path.c_str(), &rows));
  int64_t n = npam_experiments_count(rows);
  bool failed = false;
  nlohmann::ordered_json structured = nlohmann::ordered_json::array();
  if (opts.format != "structured")
    std::printf(" l1  l2 mnip  r   d    runs equalities   min-diff  result\n");
  for (int64_t i = 0; i < n; ++i) {
    int64_t len1 = 0, len2 = 0, runs = 0;
    int mnip = 0, rank = 0, dim = 0, control = 0;
    double tol = 0.0;
    uint64_t seed = 0;
    check(npam_experiments_row(rows, i, &len1, &len2, &mnip, &rank, &dim, &runs, &tol, &seed,
                               &control));
    int64_t runs_done = 0, equalities = 0;
    double min_diff = 0.0, wall = 0.0;
    const char* result = nullptr;
    npam_status status =
        npam_experiments_run(rows, i, &runs_done, &equalities, &min_diff, &wall);
    if (status == NPAM_ERR_INFEASIBLE_SPEC) {
      result = "INFEASIBLE";
      failed = true;
      std::fprintf(stderr, "row %lld: %s\n", static_cast<long long>(i + 1), npam_last_error());
    } else {
      check(status);
      if (control != 0) {
        result = equalities == runs_done ? "EQ" : "FAIL";
      } else {
        result = equalities == 0 ? "OK" : "FAIL";
      }
      if (std::string(result) == "FAIL") failed = true;
      std::fprintf(stderr, "row %lld: %.3f s\n", static_cast<long long>(i + 1), wall);
    }
    if (opts.format == "structured") {
      nlohmann::ordered_json entry;
      entry["l1"] = len1;
      entry["l2"] = len2;
      entry["mnip"] = mnip;
      entry["rank"] = rank;
      entry["dim"] = dim;
      entry["runs"] = runs;
      entry["tol"] = tol;
      entry["seed"] = seed;
      entry["control"] = control != 0;
      entry["runs_done"] = runs_done;
      entry["equalities_found"] = equalities;
      entry["min_abs_difference"] = min_diff;
      entry["result"] = result;
      structured.push_back(std::move(entry));
    } else {
      std::printf("%3lld %3lld %4d %2d %3d %7lld %10lld %10.3e  %s\n",
                  static_cast<long long>(len1), static_cast<long long>(len2), mnip, rank, dim,
                  static_cast<long long>(runs), static_cast<long long>(equalities), min_diff,
                  result);
    }
  }
  if (opts.format == "structured") std::printf("%s\n", structured.dump().c_str());
  return failed ? 5 : 0;
}

void add_scenario_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--scenario", opts.scenario,
                  "scenario: 'chsh', '3322', 'X,Y:A,B' (settings:outcomes), or a file path")
      ->required();
  cmd->add_option("--level", opts.level, "hierarchy level, e.g. '3' or '1+AB'")
      ->capture_default_str();
}

void add_sampling_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--rank", opts.rank, "projector rank")->capture_default_str();
  cmd->add_option("--samples", opts.samples, "number of sampled realizations")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "master seed")->capture_default_str();
  cmd->add_option("--tol-eq", opts.tol_eq, "equality tolerance (0 = library default)");
  cmd->add_option("--tol-zero", opts.tol_zero, "zero tolerance (0 = library default)");
}

void add_output_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "write the constraint document to this path");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  cmd->add_option("--convention", opts.convention,
                  "counting convention (all, nonzero, free, merged, merged-nonzero, merged-free)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-matrix constraint sampling, SDP relaxations, and Monte-Carlo experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(npam_version()));
  app.footer("Exit codes: 0 ok, 1 check failed, 2 usage, 3 i/o, 4 solver, 5 experiment failure.");

  CommonOpts sample_opts;
  CLI::App* sample = app.add_subcommand(
      "sample-constraints", "detect constraint classes from sampled moment matrices");
  add_scenario_options(sample, sample_opts);
  add_sampling_options(sample, sample_opts);
  add_output_options(sample, sample_opts);

  CommonOpts algebraic_opts;
  CLI::App* algebraic =
      app.add_subcommand("algebraic", "derive constraint classes from the symbolic oracle");
  add_scenario_options(algebraic, algebraic_opts);
  add_output_options(algebraic, algebraic_opts);

  CommonOpts compare_opts;
  CLI::App* compare =
      app.add_subcommand("compare", "relate a sampled partition to the algebraic one");
  add_scenario_options(compare, compare_opts);
  add_sampling_options(compare, compare_opts);
  compare->add_option("--format", compare_opts.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  compare->add_option("--convention", compare_opts.convention, "counting convention");

  CommonOpts table_opts;
  CLI::App* table1 = app.add_subcommand(
      "table1", "level-3 distinct-entry counts for the ten reference scenarios");
  table1->add_option("--samples", table_opts.samples, "number of sampled realizations")
      ->capture_default_str();
  table1->add_option("--seed", table_opts.seed, "master seed")->capture_default_str();
  table1->add_option("--tol-eq", table_opts.tol_eq, "equality tolerance (0 = library default)");
  table1->add_option("--tol-zero", table_opts.tol_zero, "zero tolerance (0 = library default)");
  table1->add_option("--format", table_opts.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  table1->add_option("--convention", table_opts.convention, "counting convention");

  SolveOpts solve_opts;
  CLI::App* solve = app.add_subcommand("solve", "maximize a Bell functional over the relaxation");
  add_scenario_options(solve, solve_opts.common);
  add_sampling_options(solve, solve_opts.common);
  solve->add_option("--functional", solve_opts.functional,
                    "functional file with records 'x y a b c' (omit for the zero functional)");
  solve->add_flag("--sampled", solve_opts.sampled,
                  "use a sampled partition instead of the algebraic one");
  solve->add_option("--export-sdpa", solve_opts.export_path,
                    "also write the problem as an SDPA sparse file");
  solve->add_option("--format", solve_opts.common.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  SolveOpts export_opts;
  export_opts.export_only = true;
  CLI::App* export_sdpa =
      app.add_subcommand("export-sdpa", "write the assembled problem as an SDPA sparse file");
  add_scenario_options(export_sdpa, export_opts.common);
  add_sampling_options(export_sdpa, export_opts.common);
  export_sdpa->add_option("--functional", export_opts.functional,
                          "functional file (omit for the zero functional)");
  export_sdpa->add_flag("--sampled", export_opts.sampled,
                        "use a sampled partition instead of the algebraic one");
  export_sdpa->add_option("--out", export_opts.export_path, "output path")->required();

  ExperimentOpts experiment_opts;
  CLI::App* experiment =
      app.add_subcommand("experiment", "run the Monte-Carlo block-pair configurations of a file");
  experiment->add_option("spec", experiment_opts.spec_path, "experiment spec file")->required();
  experiment->add_option("--format", experiment_opts.format, "output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) return cmd_sample_constraints(sample_opts);
    if (algebraic->parsed()) return cmd_algebraic(algebraic_opts);
    if (compare->parsed()) return cmd_compare(compare_opts);
    if (table1->parsed()) return cmd_table1(table_opts);
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (export_sdpa->parsed()) return cmd_solve(export_opts);
    if (experiment->parsed()) return cmd_experiment(experiment_opts);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.code;
  }
  return 2;
}
