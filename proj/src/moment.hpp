#pragma once

#include "partition.hpp"
#include "sampling.hpp"

namespace npam {

// Numeric moment matrix over a monomial basis: values(k1,k2) is the trace of
// state * M(adjoint(basis[k1])) * M(basis[k2]) for the realization's operator
// assignment M.
struct MomentMatrix {
  std::vector<Monomial> basis;
  CMat values;

  double hermiticity_error() const;
  double unit_error() const;
  double min_eigenvalue() const;
  void validate() const;
};

inline constexpr double default_tol_eq = 1e-9;
inline constexpr double default_tol_zero = 1e-9;
inline constexpr int default_samples = 2;

// Kronecker product, row-major block layout (left factor most significant).
CMat kron(const CMat& a, const CMat& b);

// Operator of a monomial in the realization's spaces: per party, the ordered
// product of that party's projectors, tensored across parties (identity where
// a party is absent). Zero maps to the zero operator.
CMat monomial_operator(const Realization& real, const Monomial& m);

// Assembled as a Gram matrix of the columns O_k * state_factor, then
// symmetrized, so Hermiticity is exact and the spectrum is nonnegative up to
// rounding.
MomentMatrix build_moment_matrix(const Realization& real, const std::vector<Monomial>& basis);

// Cluster cells into equality classes: per matrix, |value| <= tol_zero joins
// ZERO; the rest are chained along sorted real parts and sorted imaginary
// parts separately (gap <= tol_eq links neighbors) and a class is a
// (real-chain, imag-chain) intersection. Partitions from all matrices are
// intersected cell-wise, and mirror classes whose members are all real within
// tol_eq are merged with their conjugate partner.
EqualityPartition detect_partition(const std::vector<MomentMatrix>& mats, double tol_eq,
                                   double tol_zero);

// End-to-end sampling: k independent realizations from derived seeds, moment
// matrices over the level's basis, clustered into one partition.
EqualityPartition sample_partition(const Scenario& scenario, const LevelSpec& level, int rank,
                                   int samples, uint64_t seed, double tol_eq = default_tol_eq,
                                   double tol_zero = default_tol_zero);

}  // namespace npam
