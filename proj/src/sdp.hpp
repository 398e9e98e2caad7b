#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "partition.hpp"

namespace npam {

// Linear objective over joint outcome probabilities, c[(x, y, a, b)] over the
// full outcome ranges of both parties (eliminated outcomes included).
struct BellFunctional {
  Scenario scenario;
  std::map<std::array<int, 4>, double> coefficients;

  void validate() const;
  bool is_zero() const;
};

// Reads whitespace-separated records "x y a b c", one per line, with 1-based
// settings and outcomes; '#' starts a comment. The scenario bounds the
// indices.
BellFunctional parse_bell_functional(const std::string& path, const Scenario& scenario);

// constant + sum of coeff * variable terms, kept sorted by variable with
// exact-zero coefficients dropped.
struct AffineForm {
  double constant = 0.0;
  std::vector<std::pair<int32_t, double>> terms;

  void add(int32_t var, double coeff);
  void add(const AffineForm& other, double scale);
  void normalize();
  double evaluate(const std::vector<double>& values) const;

  bool operator==(const AffineForm&) const = default;
};

// Every joint probability of the scenario written as an affine form over the
// free class variables of a moment-matrix partition.
struct BehaviorMap {
  Scenario scenario;
  std::vector<AffineForm> forms;

  const AffineForm& at(int x, int y, int a, int b) const;
};

BehaviorMap behavior_map(const Scenario& scenario, const std::vector<Monomial>& basis,
                         const EqualityPartition& partition);

// One cell of the symmetric moment-matrix variable: either a pinned constant
// (var < 0) or sign * variable. Conjugate-paired classes share one real
// variable, so the structure is symmetric.
struct SdpCell {
  double constant = 0.0;
  int32_t var = -1;
  double sign = 0.0;

  bool operator==(const SdpCell&) const = default;
};

struct SdpProblem {
  int64_t matrix_size = 0;
  int64_t num_vars = 0;
  std::vector<SdpCell> cells;
  AffineForm objective;
  std::vector<std::string> labels;

  const SdpCell& at(int64_t i, int64_t j) const {
    return cells[static_cast<size_t>(i) * static_cast<size_t>(matrix_size) +
                 static_cast<size_t>(j)];
  }
  void validate() const;

  bool operator==(const SdpProblem&) const = default;
};

// Maximize the functional over moment matrices with the partition's equality
// structure, Gamma(y) >= 0, Gamma_00 = 1. A zero functional yields the
// membership form (objective identically 0).
SdpProblem assemble_sdp(const EqualityPartition& partition, const std::vector<Monomial>& basis,
                        const BellFunctional& functional);

// SDPA sparse ".dat-s" with one block. The file stores the minimization
// problem min c^T y with c = -b and F0 = -C, so that the constraint reads
// Gamma(y) = C + sum_k y_k E_k >= 0; the leading comment lines record the
// orientation, the objective constant, and the basis labels.
void export_sdpa(const SdpProblem& problem, const std::string& path);
SdpProblem import_sdpa(const std::string& path);

enum class SolveStatus { optimal, infeasible, max_iterations };
const char* status_name(SolveStatus status);

struct SolveOptions {
  int max_iter = 200;
  double gap_tol = 1e-8;
};

struct SolveReport {
  SolveStatus status = SolveStatus::max_iterations;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Primal-dual interior-point solve of the assembled problem (maximization).
// Deterministic; single-threaded per instance. Guards: matrix_size <= 200,
// num_vars <= 5000.
SolveReport solve(const SdpProblem& problem, const SolveOptions& opts = {});

}  // namespace npam
