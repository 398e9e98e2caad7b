#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"

namespace npam {

// One Monte-Carlo configuration: block lengths, symbol pool size, projector
// rank, state dimension, trial count, equality tolerance, and master seed.
// Control rows pin the homogeneous reference pair instead of generating a
// random system; they must find an equality in every trial.
struct ExperimentSpec {
  int64_t len1 = 0;
  int64_t len2 = 0;
  int mnip = 0;
  int rank = 0;
  int dim = 0;
  int64_t runs = 0;
  double tol = 1e-7;
  uint64_t seed = 0;
  bool control = false;

  void validate() const;
};

// A pair of simplified symbol sequences over the pool P_0..P_{mnip-1},
// together with the cross positions whose symbols coincide and therefore
// share one projector.
struct BlockPairSystem {
  int mnip = 0;
  std::vector<int> block_a;
  std::vector<int> block_b;
  std::vector<std::pair<int64_t, int64_t>> forced_equivalences;
};

struct ExperimentReport {
  int64_t runs_done = 0;
  int64_t equalities_found = 0;
  double min_abs_difference = 0.0;
  double wall_time = 0.0;
};

// Equal length, equal first and last symbols, and equal multisets of ordered
// consecutive symbol pairs.
bool blocks_homogeneous(const std::vector<int>& a, const std::vector<int>& b);

// Rejection-samples uniform symbol sequences until both are simplified (no
// adjacent repeats), the pair is not identical when the lengths agree, and
// the pair is not homogeneous when rank is 1. Gives up after 1e6 attempts.
BlockPairSystem generate_block_pair(const ExperimentSpec& spec, uint64_t seed);

// Samples one rank-`rank` projector per distinct symbol and one mixed state
// on dimension `dim` from the trial seed, then evaluates the two block
// traces Tr(rho * P_block). Products of projectors are not Hermitian, so the
// values are complex.
std::pair<std::complex<double>, std::complex<double>> evaluate_pair(const BlockPairSystem& system,
                                                                    int rank, int dim,
                                                                    uint64_t trial_seed);

// Evaluates `runs` independent trials of a fixed system, counting trials
// with |e1 - e2| <= tol and tracking the smallest difference seen.
ExperimentReport run_trials(const BlockPairSystem& system, int rank, int dim, int64_t runs,
                            double tol, uint64_t seed);

// Generates one system from spec.seed and runs spec.runs trials on it.
// Control rows delegate to verify_homogeneous_equality instead.
ExperimentReport run_trials(const ExperimentSpec& spec);

// Positive control: the length-5 homogeneous pair (P0,P1,P0,P2,P0) and
// (P0,P2,P0,P1,P0) with rank-1 projectors, counted at tolerance 1e-9. Every
// trial is an equality for any dimension >= 3.
ExperimentReport verify_homogeneous_equality(int64_t trials, int dim, uint64_t seed);

// Whitespace-separated records "l1 l2 mnip r d runs tol seed", one
// configuration per line; '#' starts a comment. A line "control d runs seed"
// instead yields a control row (the homogeneous pair at rank 1, tol 1e-9).
std::vector<ExperimentSpec> parse_experiment_specs(const std::string& path);

}  // namespace npam
