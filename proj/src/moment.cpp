#include "moment.hpp"

#include <unordered_map>

namespace npam {

namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

CMat hermitize(const CMat& m) { return (m + m.adjoint()) * 0.5; }

}  // namespace

double MomentMatrix::hermiticity_error() const { return max_abs(values - values.adjoint()); }

double MomentMatrix::unit_error() const { return std::abs(values(0, 0) - Cplx(1.0)); }

double MomentMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(values, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void MomentMatrix::validate() const {
  int n = static_cast<int>(basis.size());
  require(n >= 1 && values.rows() == n && values.cols() == n, ErrorCode::internal,
          "moment matrix shape mismatch");
  require(hermiticity_error() <= 1e-9, ErrorCode::internal, "moment matrix not Hermitian");
  require(unit_error() <= 1e-9, ErrorCode::internal, "moment matrix (0,0) entry differs from 1");
  require(min_eigenvalue() >= -1e-8, ErrorCode::internal,
          "moment matrix not positive semidefinite");
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

CMat monomial_operator(const Realization& real, const Monomial& m) {
  int total = real.total_dim();
  if (m.is_zero()) return CMat::Zero(total, total);

  std::vector<CMat> party_ops;
  party_ops.reserve(real.local_dims.size());
  for (int d : real.local_dims) party_ops.push_back(CMat::Identity(d, d));
  for (Sym s : m.symbols()) {
    int party = sym_party(s);
    require(party < real.scenario.parties() && sym_setting(s) < real.scenario.settings(party) &&
                sym_outcome(s) < real.scenario.n_outcomes(party, sym_setting(s)) - 1,
            ErrorCode::internal, "monomial symbol outside the realization's scenario");
    const CMat& projector = real.measurements[static_cast<size_t>(party)]
                                              [static_cast<size_t>(sym_setting(s))]
                                                  .projectors[static_cast<size_t>(sym_outcome(s))];
    auto& op = party_ops[static_cast<size_t>(party)];
    op = op * projector;
  }

  CMat full = party_ops[0];
  for (size_t i = 1; i < party_ops.size(); ++i) full = kron(full, party_ops[i]);
  return full;
}

MomentMatrix build_moment_matrix(const Realization& real, const std::vector<Monomial>& basis) {
  require(!basis.empty(), ErrorCode::invalid_argument, "empty basis");
  int n = static_cast<int>(basis.size());
  int total = real.total_dim();
  require(real.state.dim == total, ErrorCode::internal, "state dimension mismatch");

  CMat factor = state_factor(real.state);
  CMat stacked(static_cast<Eigen::Index>(total) * total, n);
  for (int k = 0; k < n; ++k) {
    CMat column = monomial_operator(real, basis[static_cast<size_t>(k)]) * factor;
    stacked.col(k) = Eigen::Map<const Eigen::VectorXcd>(column.data(), column.size());
  }

  MomentMatrix out;
  out.basis = basis;
  out.values = hermitize(stacked.adjoint() * stacked);
  return out;
}

namespace {

// Chain clustering along one real axis: neighbors in sorted order belong to
// one cluster while the gap stays within tol.
std::vector<int32_t> chain_clusters(const std::vector<double>& keys,
                                    const std::vector<size_t>& cells, double tol) {
  std::vector<size_t> order(cells.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return keys[cells[a]] < keys[cells[b]]; });
  std::vector<int32_t> cluster(cells.size(), 0);
  int32_t current = 0;
  for (size_t k = 1; k < order.size(); ++k) {
    if (keys[cells[order[k]]] - keys[cells[order[k - 1]]] > tol) ++current;
    cluster[order[k]] = current;
  }
  return cluster;
}

std::vector<int32_t> single_matrix_labels(const CMat& values, double tol_eq, double tol_zero) {
  size_t cells_total = static_cast<size_t>(values.size());
  const Cplx* flat = values.data();

  std::vector<double> re(cells_total), im(cells_total);
  std::vector<size_t> live;
  for (size_t cell = 0; cell < cells_total; ++cell) {
    re[cell] = flat[cell].real();
    im[cell] = flat[cell].imag();
    if (std::abs(flat[cell]) > tol_zero) live.push_back(cell);
  }

  std::vector<int32_t> re_cluster = chain_clusters(re, live, tol_eq);
  std::vector<int32_t> im_cluster = chain_clusters(im, live, tol_eq);

  // Label 0 is ZERO; everything else is an interned (re-chain, im-chain) pair.
  std::vector<int32_t> labels(cells_total, 0);
  std::unordered_map<uint64_t, int32_t> interned;
  for (size_t k = 0; k < live.size(); ++k) {
    uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(re_cluster[k])) << 32) |
                   static_cast<uint32_t>(im_cluster[k]);
    auto [it, fresh] = interned.try_emplace(key, static_cast<int32_t>(interned.size()) + 1);
    labels[live[k]] = it->second;
  }
  return labels;
}

}  // namespace

EqualityPartition detect_partition(const std::vector<MomentMatrix>& mats, double tol_eq,
                                   double tol_zero) {
  require(!mats.empty(), ErrorCode::invalid_argument, "need at least one moment matrix");
  require(tol_eq > 0 && tol_zero > 0, ErrorCode::invalid_argument, "tolerances must be positive");
  for (const MomentMatrix& m : mats)
    require(m.basis == mats[0].basis, ErrorCode::invalid_argument,
            "moment matrices use different bases");

  int32_t n = static_cast<int32_t>(mats[0].basis.size());
  size_t cells_total = static_cast<size_t>(n) * static_cast<size_t>(n);

  // Fold the per-matrix labels into one exact intersection label per cell and
  // keep the largest imaginary part seen per cell for the mirror-merge pass.
  std::vector<int32_t> combined = single_matrix_labels(mats[0].values, tol_eq, tol_zero);
  std::vector<bool> all_zero(cells_total);
  std::vector<double> peak_im(cells_total);
  for (size_t cell = 0; cell < cells_total; ++cell) {
    all_zero[cell] = combined[cell] == 0;
    peak_im[cell] = std::abs(mats[0].values.data()[cell].imag());
  }
  for (size_t m = 1; m < mats.size(); ++m) {
    std::vector<int32_t> labels = single_matrix_labels(mats[m].values, tol_eq, tol_zero);
    std::unordered_map<uint64_t, int32_t> interned;
    for (size_t cell = 0; cell < cells_total; ++cell) {
      uint64_t key = (static_cast<uint64_t>(static_cast<uint32_t>(combined[cell])) << 32) |
                     static_cast<uint32_t>(labels[cell]);
      auto [it, fresh] = interned.try_emplace(key, static_cast<int32_t>(interned.size()));
      combined[cell] = it->second;
      all_zero[cell] = all_zero[cell] && labels[cell] == 0;
      peak_im[cell] = std::max(peak_im[cell], std::abs(mats[m].values.data()[cell].imag()));
    }
  }

  int32_t zero_label = -1;
  for (size_t cell = 0; cell < cells_total && zero_label < 0; ++cell)
    if (all_zero[cell]) zero_label = combined[cell];
  EqualityPartition chained = finalize_partition(n, combined, zero_label);

  // Mirror merge: a class pair (c, conj c) whose members are all real within
  // tol_eq represents one real value split only by the sign of noise.
  std::vector<double> class_peak_im(static_cast<size_t>(chained.num_classes), 0.0);
  for (size_t cell = 0; cell < cells_total; ++cell) {
    auto& peak = class_peak_im[static_cast<size_t>(chained.class_of[cell])];
    peak = std::max(peak, peak_im[cell]);
  }
  UnionFind uf(static_cast<size_t>(chained.num_classes));
  for (int32_t c = 0; c < chained.num_classes; ++c) {
    int32_t partner = chained.conjugate_pairing[static_cast<size_t>(c)];
    if (partner != c && class_peak_im[static_cast<size_t>(c)] <= tol_eq &&
        class_peak_im[static_cast<size_t>(partner)] <= tol_eq)
      uf.unite(c, partner);
  }
  std::vector<int32_t> merged(cells_total);
  for (size_t cell = 0; cell < cells_total; ++cell)
    merged[cell] = uf.find(chained.class_of[cell]);
  return finalize_partition(n, merged, chained.zero_class >= 0 ? uf.find(chained.zero_class) : -1);
}

EqualityPartition sample_partition(const Scenario& scenario, const LevelSpec& level, int rank,
                                   int samples, uint64_t seed, double tol_eq, double tol_zero) {
  require(samples >= 1, ErrorCode::invalid_argument, "need at least one sample");
  std::vector<Monomial> basis = generate_basis(scenario, level);
  std::vector<MomentMatrix> mats;
  mats.reserve(static_cast<size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    Realization real =
        sample_realization(scenario, rank, derive_seed(seed, seed_role::sample, static_cast<uint64_t>(s)));
    mats.push_back(build_moment_matrix(real, basis));
  }
  return detect_partition(mats, tol_eq, tol_zero);
}

}  // namespace npam
