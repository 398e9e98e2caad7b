#include "npamoment.h"

#include <json.hpp>

#include <exception>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "experiments.hpp"
#include "moment.hpp"
#include "sdp.hpp"

struct npam_scenario {
  npam::Scenario value;
};

struct npam_basis {
  npam::Scenario scenario;
  npam::LevelSpec level;
  std::vector<npam::Monomial> monomials;
  std::vector<std::string> labels;
};

struct npam_partition {
  npam::EqualityPartition value;
};

struct npam_functional {
  npam::BellFunctional value;
};

struct npam_sdp {
  npam::SdpProblem value;
};

struct npam_experiments {
  std::vector<npam::ExperimentSpec> specs;
};

namespace {

thread_local std::string t_last_error;

npam_status status_of(npam::ErrorCode code) {
  switch (code) {
    case npam::ErrorCode::invalid_argument: return NPAM_ERR_INVALID_ARGUMENT;
    case npam::ErrorCode::io: return NPAM_ERR_IO;
    case npam::ErrorCode::solver_failure: return NPAM_ERR_SOLVER;
    case npam::ErrorCode::infeasible_spec: return NPAM_ERR_INFEASIBLE_SPEC;
    case npam::ErrorCode::internal: return NPAM_ERR_INTERNAL;
  }
  return NPAM_ERR_INTERNAL;
}

npam_status fail_status(npam_status status, const std::string& what) {
  t_last_error = what;
  return status;
}

// Runs the body, translating the library's exception taxonomy into statuses
// and recording the message for npam_last_error.
template <typename F>
npam_status guarded(F&& body) {
  try {
    body();
    return NPAM_OK;
  } catch (const npam::Error& e) {
    return fail_status(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail_status(NPAM_ERR_INTERNAL, e.what());
  }
}

npam_status require_c(bool cond, const std::string& what) {
  return cond ? NPAM_OK : fail_status(NPAM_ERR_INVALID_ARGUMENT, what);
}

std::string scenario_str(const npam::Scenario& s) {
  std::string text;
  for (int party = 0; party < s.parties(); ++party) {
    if (party > 0) text += ';';
    for (int setting = 0; setting < s.settings(party); ++setting) {
      if (setting > 0) text += ',';
      text += std::to_string(s.n_outcomes(party, setting));
    }
  }
  return text;
}

npam::CountConvention convention_of(const char* name) {
  if (name == nullptr || *name == '\0') return npam::default_convention();
  return npam::parse_convention(name);
}

void write_text_document(std::ostream& out, const npam_partition& p, const npam_basis& b,
                         npam::CountConvention convention, int64_t count) {
  const npam::EqualityPartition& part = p.value;
  out << "npam-constraints v1\n";
  out << "scenario " << scenario_str(b.scenario) << '\n';
  out << "level " << b.level.str() << '\n';
  out << "convention " << npam::convention_name(convention) << '\n';
  out << "basis " << part.basis_size << '\n';
  out << "classes " << count << '\n';
  out << "raw-classes " << part.num_classes << '\n';
  out << "zero-class " << part.zero_class << '\n';
  out << "unit-class " << part.unit_class << '\n';
  out << "labels\n";
  for (size_t k = 0; k < b.labels.size(); ++k) out << k << ' ' << b.labels[k] << '\n';
  out << "matrix\n";
  for (int32_t i = 0; i < part.basis_size; ++i) {
    for (int32_t j = 0; j < part.basis_size; ++j) {
      if (j > 0) out << ' ';
      out << part.at(i, j);
    }
    out << '\n';
  }
}

void write_structured_document(std::ostream& out, const npam_partition& p, const npam_basis& b,
                               npam::CountConvention convention, int64_t count) {
  const npam::EqualityPartition& part = p.value;
  nlohmann::ordered_json doc;
  doc["schema"] = "npam-constraints";
  doc["version"] = 1;
  doc["scenario"] = b.scenario.outcomes;
  doc["level"] = b.level.str();
  doc["convention"] = npam::convention_name(convention);
  doc["basis"] = b.labels;
  doc["classes"] = count;
  doc["raw_classes"] = part.num_classes;
  doc["zero_class"] = part.zero_class;
  doc["unit_class"] = part.unit_class;
  auto rows = nlohmann::ordered_json::array();
  for (int32_t i = 0; i < part.basis_size; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int32_t j = 0; j < part.basis_size; ++j) row.push_back(part.at(i, j));
    rows.push_back(std::move(row));
  }
  doc["class_of"] = std::move(rows);
  out << doc.dump() << '\n';
}

}  // namespace

extern "C" {

const char* npam_version(void) { return "1.0.0"; }

const char* npam_last_error(void) { return t_last_error.c_str(); }

npam_status npam_scenario_two_party(int a_settings, int b_settings, int a_outcomes,
                                    int b_outcomes, npam_scenario** out) {
  if (npam_status s = require_c(out != nullptr, "null output pointer")) return s;
  return guarded([&] {
    *out = new npam_scenario{npam::make_two_party(a_settings, b_settings, a_outcomes, b_outcomes)};
  });
}

npam_status npam_scenario_general(int parties, const int* settings, const int* outcomes,
                                  npam_scenario** out) {
  if (npam_status s = require_c(out != nullptr, "null output pointer")) return s;
  if (npam_status s = require_c(parties >= 1, "parties must be positive")) return s;
  if (npam_status s = require_c(settings != nullptr && outcomes != nullptr,
                                "null settings or outcomes array"))
    return s;
  return guarded([&] {
    npam::Scenario scenario;
    int next = 0;
    for (int party = 0; party < parties; ++party) {
      npam::require(settings[party] >= 1, npam::ErrorCode::invalid_argument,
                    "every party needs at least one setting");
      scenario.outcomes.emplace_back(outcomes + next, outcomes + next + settings[party]);
      next += settings[party];
    }
    scenario.validate();
    *out = new npam_scenario{std::move(scenario)};
  });
}

int npam_scenario_parties(const npam_scenario* s) {
  return s == nullptr ? -1 : s->value.parties();
}

int npam_scenario_settings(const npam_scenario* s, int party) {
  if (s == nullptr || party < 0 || party >= s->value.parties()) return -1;
  return s->value.settings(party);
}

int npam_scenario_outcomes(const npam_scenario* s, int party, int setting) {
  if (s == nullptr || party < 0 || party >= s->value.parties()) return -1;
  if (setting < 0 || setting >= s->value.settings(party)) return -1;
  return s->value.n_outcomes(party, setting);
}

void npam_scenario_free(npam_scenario* s) { delete s; }

npam_status npam_basis_create(const npam_scenario* s, const char* level, npam_basis** out) {
  if (npam_status st = require_c(s != nullptr && level != nullptr && out != nullptr,
                                 "null scenario, level, or output pointer"))
    return st;
  return guarded([&] {
    auto basis = std::make_unique<npam_basis>();
    basis->scenario = s->value;
    basis->level = npam::parse_level(level, s->value.parties());
    basis->monomials = npam::generate_basis(basis->scenario, basis->level);
    basis->labels.reserve(basis->monomials.size());
    for (const npam::Monomial& m : basis->monomials) basis->labels.push_back(m.str());
    *out = basis.release();
  });
}

int64_t npam_basis_size(const npam_basis* b) {
  return b == nullptr ? -1 : static_cast<int64_t>(b->monomials.size());
}

const char* npam_basis_label(const npam_basis* b, int64_t index) {
  if (b == nullptr || index < 0 || index >= static_cast<int64_t>(b->labels.size())) return nullptr;
  return b->labels[static_cast<size_t>(index)].c_str();
}

npam_status npam_basis_check_result1(const npam_basis* b, int rank, int* holds) {
  if (npam_status st = require_c(b != nullptr && holds != nullptr, "null basis or output pointer"))
    return st;
  return guarded([&] { *holds = npam::check_result1(b->scenario, b->level, rank) ? 1 : 0; });
}

void npam_basis_free(npam_basis* b) { delete b; }

npam_status npam_partition_algebraic(const npam_basis* b, npam_partition** out) {
  if (npam_status st = require_c(b != nullptr && out != nullptr, "null basis or output pointer"))
    return st;
  return guarded([&] { *out = new npam_partition{npam::algebraic_partition(b->monomials)}; });
}

npam_status npam_partition_sample(const npam_basis* b, int rank, int samples, uint64_t seed,
                                  double tol_eq, double tol_zero, npam_partition** out) {
  if (npam_status st = require_c(b != nullptr && out != nullptr, "null basis or output pointer"))
    return st;
  if (tol_eq <= 0) tol_eq = npam::default_tol_eq;
  if (tol_zero <= 0) tol_zero = npam::default_tol_zero;
  return guarded([&] {
    *out = new npam_partition{
        npam::sample_partition(b->scenario, b->level, rank, samples, seed, tol_eq, tol_zero)};
  });
}

int64_t npam_partition_num_classes(const npam_partition* p) {
  return p == nullptr ? -1 : p->value.num_classes;
}

int64_t npam_partition_basis_size(const npam_partition* p) {
  return p == nullptr ? -1 : p->value.basis_size;
}

int32_t npam_partition_class_at(const npam_partition* p, int64_t row, int64_t col) {
  if (p == nullptr || row < 0 || col < 0) return -1;
  if (row >= p->value.basis_size || col >= p->value.basis_size) return -1;
  return p->value.at(static_cast<int32_t>(row), static_cast<int32_t>(col));
}

int32_t npam_partition_zero_class(const npam_partition* p) {
  return p == nullptr ? -1 : p->value.zero_class;
}

npam_status npam_partition_count(const npam_partition* p, const char* convention, int64_t* out) {
  if (npam_status st = require_c(p != nullptr && out != nullptr,
                                 "null partition or output pointer"))
    return st;
  return guarded([&] { *out = npam::count_unique(p->value, convention_of(convention)); });
}

npam_status npam_partition_compare(const npam_partition* sampled, const npam_partition* reference,
                                   int64_t* merges, int64_t* splits, int* equal, int* refinement) {
  if (npam_status st = require_c(sampled != nullptr && reference != nullptr,
                                 "null partition handle"))
    return st;
  return guarded([&] {
    npam::ComparisonReport report = npam::compare_partitions(sampled->value, reference->value);
    if (merges != nullptr) *merges = static_cast<int64_t>(report.merges.size());
    if (splits != nullptr) *splits = static_cast<int64_t>(report.splits.size());
    if (equal != nullptr) *equal = report.equal ? 1 : 0;
    if (refinement != nullptr) *refinement = report.refinement ? 1 : 0;
  });
}

npam_status npam_partition_write(const npam_partition* p, const npam_basis* b, npam_format format,
                                 const char* convention, const char* path) {
  if (npam_status st = require_c(p != nullptr && b != nullptr && path != nullptr,
                                 "null partition, basis, or path"))
    return st;
  if (npam_status st = require_c(format == NPAM_FORMAT_TEXT || format == NPAM_FORMAT_STRUCTURED,
                                 "unknown document format"))
    return st;
  return guarded([&] {
    npam::require(p->value.basis_size == static_cast<int64_t>(b->monomials.size()),
                  npam::ErrorCode::invalid_argument, "basis does not match the partition");
    npam::CountConvention c = convention_of(convention);
    int64_t count = npam::count_unique(p->value, c);
    std::ofstream out(path);
    npam::require(static_cast<bool>(out), npam::ErrorCode::io,
                  std::string("cannot open output file: ") + path);
    if (format == NPAM_FORMAT_TEXT) {
      write_text_document(out, *p, *b, c, count);
    } else {
      write_structured_document(out, *p, *b, c, count);
    }
    out.flush();
    npam::require(out.good(), npam::ErrorCode::io, std::string("write failed: ") + path);
  });
}

void npam_partition_free(npam_partition* p) { delete p; }

npam_status npam_functional_load(const npam_scenario* s, const char* path,
                                 npam_functional** out) {
  if (npam_status st = require_c(s != nullptr && path != nullptr && out != nullptr,
                                 "null scenario, path, or output pointer"))
    return st;
  return guarded([&] {
    *out = new npam_functional{npam::parse_bell_functional(path, s->value)};
  });
}

npam_status npam_functional_zero(const npam_scenario* s, npam_functional** out) {
  if (npam_status st = require_c(s != nullptr && out != nullptr,
                                 "null scenario or output pointer"))
    return st;
  return guarded([&] {
    npam::BellFunctional f;
    f.scenario = s->value;
    f.validate();
    *out = new npam_functional{std::move(f)};
  });
}

void npam_functional_free(npam_functional* f) { delete f; }

npam_status npam_sdp_assemble(const npam_partition* p, const npam_basis* b,
                              const npam_functional* f, npam_sdp** out) {
  if (npam_status st = require_c(p != nullptr && b != nullptr && f != nullptr && out != nullptr,
                                 "null partition, basis, functional, or output pointer"))
    return st;
  return guarded([&] {
    *out = new npam_sdp{npam::assemble_sdp(p->value, b->monomials, f->value)};
  });
}

int64_t npam_sdp_matrix_size(const npam_sdp* sdp) {
  return sdp == nullptr ? -1 : sdp->value.matrix_size;
}

int64_t npam_sdp_num_vars(const npam_sdp* sdp) {
  return sdp == nullptr ? -1 : sdp->value.num_vars;
}

npam_status npam_sdp_export(const npam_sdp* sdp, const char* path) {
  if (npam_status st = require_c(sdp != nullptr && path != nullptr, "null problem or path"))
    return st;
  return guarded([&] { npam::export_sdpa(sdp->value, path); });
}

npam_status npam_sdp_solve(const npam_sdp* sdp, int max_iter, double gap_tol, int* solve_status,
                           double* value, double* gap, int* iterations) {
  if (npam_status st = require_c(sdp != nullptr, "null problem handle")) return st;
  return guarded([&] {
    npam::SolveOptions opts;
    if (max_iter > 0) opts.max_iter = max_iter;
    if (gap_tol > 0) opts.gap_tol = gap_tol;
    npam::SolveReport report = npam::solve(sdp->value, opts);
    if (solve_status != nullptr) {
      switch (report.status) {
        case npam::SolveStatus::optimal: *solve_status = NPAM_SOLVE_OPTIMAL; break;
        case npam::SolveStatus::infeasible: *solve_status = NPAM_SOLVE_INFEASIBLE; break;
        case npam::SolveStatus::max_iterations: *solve_status = NPAM_SOLVE_MAX_ITERATIONS; break;
      }
    }
    if (value != nullptr) *value = report.primal_value;
    if (gap != nullptr) *gap = report.gap;
    if (iterations != nullptr) *iterations = report.iterations;
  });
}

void npam_sdp_free(npam_sdp* sdp) { delete sdp; }

npam_status npam_experiments_load(const char* path, npam_experiments** out) {
  if (npam_status st = require_c(path != nullptr && out != nullptr,
                                 "null path or output pointer"))
    return st;
  return guarded([&] { *out = new npam_experiments{npam::parse_experiment_specs(path)}; });
}

int64_t npam_experiments_count(const npam_experiments* e) {
  return e == nullptr ? -1 : static_cast<int64_t>(e->specs.size());
}

npam_status npam_experiments_row(const npam_experiments* e, int64_t index, int64_t* len1,
                                 int64_t* len2, int* mnip, int* rank, int* dim, int64_t* runs,
                                 double* tol, uint64_t* seed, int* control) {
  if (npam_status st = require_c(e != nullptr, "null experiments handle")) return st;
  if (npam_status st = require_c(index >= 0 && index < static_cast<int64_t>(e->specs.size()),
                                 "row index out of range"))
    return st;
  const npam::ExperimentSpec& spec = e->specs[static_cast<size_t>(index)];
  if (len1 != nullptr) *len1 = spec.len1;
  if (len2 != nullptr) *len2 = spec.len2;
  if (mnip != nullptr) *mnip = spec.mnip;
  if (rank != nullptr) *rank = spec.rank;
  if (dim != nullptr) *dim = spec.dim;
  if (runs != nullptr) *runs = spec.runs;
  if (tol != nullptr) *tol = spec.tol;
  if (seed != nullptr) *seed = spec.seed;
  if (control != nullptr) *control = spec.control ? 1 : 0;
  return NPAM_OK;
}

npam_status npam_experiments_run(const npam_experiments* e, int64_t index, int64_t* runs_done,
                                 int64_t* equalities_found, double* min_abs_difference,
                                 double* wall_time) {
  if (npam_status st = require_c(e != nullptr, "null experiments handle")) return st;
  if (npam_status st = require_c(index >= 0 && index < static_cast<int64_t>(e->specs.size()),
                                 "row index out of range"))
    return st;
  return guarded([&] {
    npam::ExperimentReport report = npam::run_trials(e->specs[static_cast<size_t>(index)]);
    if (runs_done != nullptr) *runs_done = report.runs_done;
    if (equalities_found != nullptr) *equalities_found = report.equalities_found;
    if (min_abs_difference != nullptr) *min_abs_difference = report.min_abs_difference;
    if (wall_time != nullptr) *wall_time = report.wall_time;
  });
}

void npam_experiments_free(npam_experiments* e) { delete e; }

}  // extern "C"
