#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "scenario.hpp"

namespace npam {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

// Haar-flavored random mixed state: M·M†/Tr(M·M†) for a Ginibre matrix M.
struct DensityMatrix {
  int dim = 0;
  CMat entries;

  double hermiticity_error() const;
  double trace_error() const;
  double min_eigenvalue() const;
  void validate() const;
};

// A projective measurement: n mutually orthogonal projectors summing to the
// identity. Every projector except the last has rank exactly `rank`; the last
// absorbs whatever of the space is left.
struct ProjectorSet {
  int dim = 0;
  int rank = 0;
  std::vector<CMat> projectors;

  int n_outcomes() const { return static_cast<int>(projectors.size()); }
  double idempotency_error() const;
  double orthogonality_error() const;
  double completeness_error() const;
  int rank_of(int outcome) const;
  void validate() const;
};

// A concrete quantum realization of a scenario: shared state plus one
// projector set per (party, setting), all deterministically derived from one
// master seed.
struct Realization {
  Scenario scenario;
  int rank = 1;
  std::vector<int> local_dims;
  DensityMatrix state;
  std::vector<std::vector<ProjectorSet>> measurements;

  int total_dim() const;
  void validate() const;
};

DensityMatrix sample_density_matrix(int dim, uint64_t seed);

ProjectorSet sample_projective_measurement(int dim, int rank, int n_outcomes, uint64_t seed);

// Local dimension per party: rank * max_x N^i(x). Settings with fewer
// outcomes than the maximum get an oversized final projector.
Realization sample_realization(const Scenario& scenario, int rank, uint64_t seed);

// Column factor R with state = R·R†; lets the moment builder assemble Gram
// vectors so the resulting matrix is positive semidefinite by construction.
CMat state_factor(const DensityMatrix& state);

}  // namespace npam
