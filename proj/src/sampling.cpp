#include "sampling.hpp"

namespace npam {

namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

// Exact Hermitian symmetrization; IEEE addition makes the result's (i,j) and
// (j,i) entries exact conjugates and the diagonal exactly real.
CMat hermitize(const CMat& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

double DensityMatrix::hermiticity_error() const { return max_abs(entries - entries.adjoint()); }

double DensityMatrix::trace_error() const { return std::abs(entries.trace() - Cplx(1.0)); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  require(dim >= 1 && entries.rows() == dim && entries.cols() == dim, ErrorCode::internal,
          "density matrix shape mismatch");
  require(hermiticity_error() <= 1e-12, ErrorCode::internal, "density matrix not Hermitian");
  require(trace_error() <= 1e-12, ErrorCode::internal, "density matrix trace differs from 1");
  require(min_eigenvalue() >= -1e-10, ErrorCode::internal,
          "density matrix not positive semidefinite");
}

double ProjectorSet::idempotency_error() const {
  double worst = 0.0;
  for (const CMat& p : projectors) worst = std::max(worst, max_abs(p * p - p));
  return worst;
}

double ProjectorSet::orthogonality_error() const {
  double worst = 0.0;
  for (size_t j = 0; j < projectors.size(); ++j)
    for (size_t k = j + 1; k < projectors.size(); ++k)
      worst = std::max(worst, max_abs(projectors[j] * projectors[k]));
  return worst;
}

double ProjectorSet::completeness_error() const {
  CMat sum = CMat::Zero(dim, dim);
  for (const CMat& p : projectors) sum += p;
  return max_abs(sum - CMat::Identity(dim, dim));
}

int ProjectorSet::rank_of(int outcome) const {
  Eigen::SelfAdjointEigenSolver<CMat> es(projectors[static_cast<size_t>(outcome)],
                                         Eigen::EigenvaluesOnly);
  return static_cast<int>((es.eigenvalues().array() > 0.5).count());
}

void ProjectorSet::validate() const {
  require(dim >= 1 && rank >= 1 && !projectors.empty(), ErrorCode::internal,
          "projector set shape mismatch");
  for (const CMat& p : projectors)
    require(p.rows() == dim && p.cols() == dim, ErrorCode::internal,
            "projector dimension mismatch");
  require(idempotency_error() <= 1e-10, ErrorCode::internal, "projectors not idempotent");
  require(orthogonality_error() <= 1e-10, ErrorCode::internal,
          "projectors not mutually orthogonal");
  require(completeness_error() <= 1e-10, ErrorCode::internal,
          "projectors do not resolve the identity");
  for (int j = 0; j + 1 < n_outcomes(); ++j)
    require(rank_of(j) == rank, ErrorCode::internal, "non-final projector has wrong rank");
}

int Realization::total_dim() const {
  int d = 1;
  for (int di : local_dims) d *= di;
  return d;
}

void Realization::validate() const {
  scenario.validate();
  require(rank >= 1, ErrorCode::internal, "realization rank must be positive");
  require(static_cast<int>(local_dims.size()) == scenario.parties(), ErrorCode::internal,
          "one local dimension per party required");
  require(state.dim == total_dim(), ErrorCode::internal,
          "state dimension is not the product of local dimensions");
  state.validate();
  require(static_cast<int>(measurements.size()) == scenario.parties(), ErrorCode::internal,
          "one measurement list per party required");
  for (int i = 0; i < scenario.parties(); ++i) {
    const auto& sets = measurements[static_cast<size_t>(i)];
    require(static_cast<int>(sets.size()) == scenario.settings(i), ErrorCode::internal,
            "one projector set per setting required");
    for (int x = 0; x < scenario.settings(i); ++x) {
      const ProjectorSet& set = sets[static_cast<size_t>(x)];
      require(set.dim == local_dims[static_cast<size_t>(i)], ErrorCode::internal,
              "projector set dimension mismatch");
      require(set.n_outcomes() == scenario.n_outcomes(i, x), ErrorCode::internal,
              "projector set outcome count mismatch");
      set.validate();
    }
  }
}

DensityMatrix sample_density_matrix(int dim, uint64_t seed) {
  require(dim >= 1, ErrorCode::invalid_argument, "density matrix dimension must be positive");
  Rng rng(seed);
  CMat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double re = rng.gaussian();
      double im = rng.gaussian();
      m(i, j) = Cplx(re, im);
    }
  CMat gram = hermitize(m * m.adjoint());
  DensityMatrix out;
  out.dim = dim;
  out.entries = gram / gram.trace().real();
  return out;
}

ProjectorSet sample_projective_measurement(int dim, int rank, int n_outcomes, uint64_t seed) {
  require(dim >= 1, ErrorCode::invalid_argument, "dimension must be positive");
  require(rank >= 1, ErrorCode::invalid_argument, "rank must be positive");
  require(n_outcomes >= 1, ErrorCode::invalid_argument, "outcome count must be positive");
  require(dim >= rank * n_outcomes, ErrorCode::invalid_argument,
          "dimension too small: need dim >= rank * n_outcomes");

  DensityMatrix seed_state = sample_density_matrix(dim, seed);
  Eigen::SelfAdjointEigenSolver<CMat> es(seed_state.entries);
  const CMat& vectors = es.eigenvectors();

  ProjectorSet out;
  out.dim = dim;
  out.rank = rank;
  out.projectors.reserve(static_cast<size_t>(n_outcomes));
  for (int j = 0; j < n_outcomes; ++j) {
    int first = j * rank;
    int count = (j + 1 == n_outcomes) ? dim - first : rank;
    CMat block = vectors.middleCols(first, count);
    out.projectors.push_back(hermitize(block * block.adjoint()));
  }
  return out;
}

Realization sample_realization(const Scenario& scenario, int rank, uint64_t seed) {
  scenario.validate();
  require(rank >= 1, ErrorCode::invalid_argument, "rank must be positive");

  Realization real;
  real.scenario = scenario;
  real.rank = rank;
  long total = 1;
  for (int i = 0; i < scenario.parties(); ++i) {
    int di = rank * scenario.max_outcomes(i);
    real.local_dims.push_back(di);
    total *= di;
    require(total <= 2048, ErrorCode::invalid_argument,
            "total state dimension exceeds the supported limit of 2048");
  }

  real.state = sample_density_matrix(static_cast<int>(total), derive_seed(seed, seed_role::state));
  for (int i = 0; i < scenario.parties(); ++i) {
    std::vector<ProjectorSet> sets;
    for (int x = 0; x < scenario.settings(i); ++x)
      sets.push_back(sample_projective_measurement(
          real.local_dims[static_cast<size_t>(i)], rank, scenario.n_outcomes(i, x),
          derive_seed(seed, seed_role::measurement, static_cast<uint64_t>(i),
                      static_cast<uint64_t>(x))));
    real.measurements.push_back(std::move(sets));
  }
  return real;
}

CMat state_factor(const DensityMatrix& state) {
  Eigen::SelfAdjointEigenSolver<CMat> es(state.entries);
  Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * clamped.asDiagonal();
}

}  // namespace npam
