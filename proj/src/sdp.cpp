#include "sdp.hpp"
#include <cstdlib>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace npam {

void BellFunctional::validate() const {
  scenario.validate();
  require(scenario.parties() == 2, ErrorCode::invalid_argument,
          "Bell functionals are two-party; got " + std::to_string(scenario.parties()) +
              " parties");
  for (const auto& [idx, value] : coefficients) {
    auto [x, y, a, b] = idx;
    require(x >= 0 && x < scenario.settings(0), ErrorCode::invalid_argument,
            "functional setting x=" + std::to_string(x) + " out of range");
    require(y >= 0 && y < scenario.settings(1), ErrorCode::invalid_argument,
            "functional setting y=" + std::to_string(y) + " out of range");
    require(a >= 0 && a < scenario.n_outcomes(0, x), ErrorCode::invalid_argument,
            "functional outcome a=" + std::to_string(a) + " out of range for x=" +
                std::to_string(x));
    require(b >= 0 && b < scenario.n_outcomes(1, y), ErrorCode::invalid_argument,
            "functional outcome b=" + std::to_string(b) + " out of range for y=" +
                std::to_string(y));
    (void)value;
  }
}

bool BellFunctional::is_zero() const {
  for (const auto& [idx, value] : coefficients)
    if (value != 0.0) return false;
  return true;
}

BellFunctional parse_bell_functional(const std::string& path, const Scenario& scenario) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open functional file: " + path);
  BellFunctional f;
  f.scenario = scenario;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int x, y, a, b;
    double c;
    if (!(fields >> x)) continue;
    require(static_cast<bool>(fields >> y >> a >> b >> c), ErrorCode::io,
            path + ":" + std::to_string(lineno) + ": expected record \"x y a b c\"");
    std::string rest;
    require(!(fields >> rest), ErrorCode::io,
            path + ":" + std::to_string(lineno) + ": trailing fields after record");
    f.coefficients[{x - 1, y - 1, a - 1, b - 1}] += c;
  }
  f.validate();
  return f;
}

void AffineForm::add(int32_t var, double coeff) { terms.emplace_back(var, coeff); }

void AffineForm::add(const AffineForm& other, double scale) {
  constant += scale * other.constant;
  for (const auto& [var, coeff] : other.terms) terms.emplace_back(var, scale * coeff);
}

void AffineForm::normalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<std::pair<int32_t, double>> merged;
  for (const auto& [var, coeff] : terms) {
    if (!merged.empty() && merged.back().first == var)
      merged.back().second += coeff;
    else
      merged.emplace_back(var, coeff);
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(merged);
}

double AffineForm::evaluate(const std::vector<double>& values) const {
  double total = constant;
  for (const auto& [var, coeff] : terms) total += coeff * values[static_cast<size_t>(var)];
  return total;
}

const AffineForm& BehaviorMap::at(int x, int y, int a, int b) const {
  require(x >= 0 && x < scenario.settings(0) && y >= 0 && y < scenario.settings(1),
          ErrorCode::invalid_argument, "behavior setting out of range");
  require(a >= 0 && a < scenario.n_outcomes(0, x) && b >= 0 && b < scenario.n_outcomes(1, y),
          ErrorCode::invalid_argument, "behavior outcome out of range");
  size_t idx = 0;
  for (int xx = 0; xx < scenario.settings(0); ++xx)
    for (int yy = 0; yy < scenario.settings(1); ++yy) {
      if (xx == x && yy == y)
        return forms[idx + static_cast<size_t>(a) * static_cast<size_t>(scenario.n_outcomes(1, yy)) +
                     static_cast<size_t>(b)];
      idx += static_cast<size_t>(scenario.n_outcomes(0, xx)) *
             static_cast<size_t>(scenario.n_outcomes(1, yy));
    }
  fail(ErrorCode::internal, "behavior index fell through");
}

namespace {

// Free variables are conjugate-class orbits, excluding the unit and zero
// classes; numbered by increasing orbit representative so that assembly is
// deterministic.
std::vector<int32_t> orbit_variables(const EqualityPartition& p, int64_t* num_vars) {
  std::vector<int32_t> var_of(static_cast<size_t>(p.num_classes), -1);
  int32_t next = 0;
  for (int32_t c = 0; c < p.num_classes; ++c) {
    int32_t rep = std::min(c, p.conjugate_pairing[static_cast<size_t>(c)]);
    if (rep != c) {
      var_of[static_cast<size_t>(c)] = var_of[static_cast<size_t>(rep)];
      continue;
    }
    if (c == p.zero_class || c == p.unit_class) continue;
    var_of[static_cast<size_t>(c)] = next++;
  }
  *num_vars = next;
  return var_of;
}

AffineForm cell_form(const EqualityPartition& p, const std::vector<int32_t>& var_of,
                     int64_t i, int64_t j) {
  int32_t c = p.at(i, j);
  AffineForm form;
  if (c == p.unit_class)
    form.constant = 1.0;
  else if (c != p.zero_class)
    form.add(var_of[static_cast<size_t>(c)], 1.0);
  return form;
}

}  // namespace

BehaviorMap behavior_map(const Scenario& scenario, const std::vector<Monomial>& basis,
                         const EqualityPartition& partition) {
  scenario.validate();
  require(scenario.parties() == 2, ErrorCode::invalid_argument,
          "behavior maps are two-party");
  require(static_cast<int64_t>(basis.size()) == partition.basis_size,
          ErrorCode::invalid_argument, "basis size does not match the partition");

  std::unordered_map<Monomial, int64_t, MonomialHash> index;
  for (size_t k = 0; k < basis.size(); ++k) index.emplace(basis[k], static_cast<int64_t>(k));
  auto index_of = [&](const Monomial& m) {
    auto it = index.find(m);
    require(it != index.end(), ErrorCode::invalid_argument,
            "basis is missing required monomial " + m.str());
    return it->second;
  };
  int64_t identity = index_of(Monomial::identity());
  for (int party = 0; party < 2; ++party)
    for (int setting = 0; setting < scenario.settings(party); ++setting)
      for (int outcome = 0; outcome + 1 < scenario.n_outcomes(party, setting); ++outcome)
        index_of(Monomial::single(make_sym(party, setting, outcome)));

  int64_t num_vars = 0;
  std::vector<int32_t> var_of = orbit_variables(partition, &num_vars);

  // Retained outcomes read off single cells; each setting's last outcome is
  // reconstructed through completeness of the measurement.
  auto single = [&](int party, int setting, int outcome) {
    return index_of(Monomial::single(make_sym(party, setting, outcome)));
  };
  auto marginal = [&](int party, int setting, int outcome) {
    return cell_form(partition, var_of, identity, single(party, setting, outcome));
  };

  BehaviorMap map;
  map.scenario = scenario;
  for (int x = 0; x < scenario.settings(0); ++x)
    for (int y = 0; y < scenario.settings(1); ++y) {
      int na = scenario.n_outcomes(0, x);
      int nb = scenario.n_outcomes(1, y);
      for (int a = 0; a < na; ++a)
        for (int b = 0; b < nb; ++b) {
          AffineForm form;
          if (a < na - 1 && b < nb - 1) {
            form = cell_form(partition, var_of, single(0, x, a), single(1, y, b));
          } else if (a < na - 1) {
            form = marginal(0, x, a);
            for (int bb = 0; bb < nb - 1; ++bb)
              form.add(cell_form(partition, var_of, single(0, x, a), single(1, y, bb)),
                       -1.0);
          } else if (b < nb - 1) {
            form = marginal(1, y, b);
            for (int aa = 0; aa < na - 1; ++aa)
              form.add(cell_form(partition, var_of, single(0, x, aa), single(1, y, b)),
                       -1.0);
          } else {
            form.constant = 1.0;
            for (int aa = 0; aa < na - 1; ++aa) form.add(marginal(0, x, aa), -1.0);
            for (int bb = 0; bb < nb - 1; ++bb) form.add(marginal(1, y, bb), -1.0);
            for (int aa = 0; aa < na - 1; ++aa)
              for (int bb = 0; bb < nb - 1; ++bb)
                form.add(cell_form(partition, var_of, single(0, x, aa), single(1, y, bb)),
                         1.0);
          }
          form.normalize();
          map.forms.push_back(std::move(form));
        }
    }
  return map;
}

void SdpProblem::validate() const {
  require(matrix_size >= 1, ErrorCode::invalid_argument, "empty moment matrix");
  require(cells.size() == static_cast<size_t>(matrix_size) * static_cast<size_t>(matrix_size),
          ErrorCode::invalid_argument, "cell table does not match the matrix size");
  require(at(0, 0).var < 0 && at(0, 0).constant == 1.0, ErrorCode::internal,
          "corner cell must be pinned to 1");
  for (int64_t i = 0; i < matrix_size; ++i)
    for (int64_t j = 0; j < matrix_size; ++j) {
      const SdpCell& c = at(i, j);
      require(c == at(j, i), ErrorCode::internal, "cell structure is not symmetric");
      require(c.var < num_vars, ErrorCode::internal, "cell variable out of range");
      if (c.var >= 0)
        require(c.constant == 0.0 && c.sign != 0.0, ErrorCode::internal,
                "variable cells carry no constant and a nonzero sign");
    }
  for (const auto& [var, coeff] : objective.terms) {
    require(var >= 0 && var < num_vars, ErrorCode::internal, "objective variable out of range");
    (void)coeff;
  }
}

SdpProblem assemble_sdp(const EqualityPartition& partition, const std::vector<Monomial>& basis,
                        const BellFunctional& functional) {
  functional.validate();
  BehaviorMap behaviors = behavior_map(functional.scenario, basis, partition);

  SdpProblem problem;
  problem.matrix_size = partition.basis_size;
  std::vector<int32_t> var_of = orbit_variables(partition, &problem.num_vars);

  problem.cells.resize(static_cast<size_t>(partition.basis_size) *
                       static_cast<size_t>(partition.basis_size));
  for (int64_t i = 0; i < partition.basis_size; ++i)
    for (int64_t j = 0; j < partition.basis_size; ++j) {
      int32_t c = partition.at(i, j);
      SdpCell& cell = problem.cells[static_cast<size_t>(i) *
                                        static_cast<size_t>(partition.basis_size) +
                                    static_cast<size_t>(j)];
      if (c == partition.unit_class)
        cell.constant = 1.0;
      else if (c != partition.zero_class) {
        cell.var = var_of[static_cast<size_t>(c)];
        cell.sign = 1.0;
      }
    }

  for (const auto& [idx, value] : functional.coefficients) {
    auto [x, y, a, b] = idx;
    if (value == 0.0) continue;
    problem.objective.add(behaviors.at(x, y, a, b), value);
  }
  problem.objective.normalize();

  for (const Monomial& m : basis) problem.labels.push_back(m.str());
  problem.validate();
  return problem;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_sdpa(const SdpProblem& problem, const std::string& path) {
  problem.validate();
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot open for writing: " + path);

  out << "* moment-matrix relaxation, LMI orientation:"
         " Gamma(y) = C + sum_k y_k E_k >= 0, stored as F0 = -C, Fk = E_k\n";
  out << "* source problem maximizes b^T y + constant; this file minimizes c^T y with c = -b\n";
  out << "* objective-constant " << fmt17(problem.objective.constant) << "\n";
  for (size_t k = 0; k < problem.labels.size(); ++k)
    out << "* basis " << k << " " << problem.labels[k] << "\n";

  out << problem.num_vars << "\n";
  out << 1 << "\n";
  out << problem.matrix_size << "\n";

  std::vector<double> b(static_cast<size_t>(problem.num_vars), 0.0);
  for (const auto& [var, coeff] : problem.objective.terms) b[static_cast<size_t>(var)] = coeff;
  for (size_t k = 0; k < b.size(); ++k) out << (k ? " " : "") << fmt17(-b[k]);
  out << "\n";

  for (int64_t i = 0; i < problem.matrix_size; ++i)
    for (int64_t j = i; j < problem.matrix_size; ++j) {
      const SdpCell& cell = problem.at(i, j);
      if (cell.var >= 0)
        out << cell.var + 1 << " 1 " << i + 1 << " " << j + 1 << " " << fmt17(cell.sign)
            << "\n";
      else if (cell.constant != 0.0)
        out << "0 1 " << i + 1 << " " << j + 1 << " " << fmt17(-cell.constant) << "\n";
    }
  out.flush();
  require(out.good(), ErrorCode::io, "write failed: " + path);
}

SdpProblem import_sdpa(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open: " + path);

  SdpProblem problem;
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '*' || line[0] == '"')) {
      header.push_back(line);
      continue;
    }
    break;
  }
  for (const std::string& h : header) {
    std::istringstream fields(h);
    std::string star, tag;
    fields >> star >> tag;
    if (tag == "objective-constant") {
      require(static_cast<bool>(fields >> problem.objective.constant), ErrorCode::invalid_argument,
              "malformed objective-constant comment");
    } else if (tag == "basis") {
      size_t k;
      fields >> k;
      std::string label;
      std::getline(fields, label);
      if (!label.empty() && label.front() == ' ') label.erase(0, 1);
      require(k == problem.labels.size(), ErrorCode::invalid_argument,
              "basis labels out of order");
      problem.labels.push_back(label);
    }
  }

  auto read_counts = [&](const std::string& text, const char* what) {
    std::istringstream fields(text);
    int64_t v;
    require(static_cast<bool>(fields >> v), ErrorCode::invalid_argument,
            std::string("malformed ") + what);
    return v;
  };
  problem.num_vars = read_counts(line, "variable count");
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::invalid_argument, "truncated file");
  require(read_counts(line, "block count") == 1, ErrorCode::invalid_argument,
          "expected a single block");
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::invalid_argument, "truncated file");
  problem.matrix_size = read_counts(line, "block size");
  require(problem.matrix_size >= 1 && problem.num_vars >= 0, ErrorCode::invalid_argument,
          "bad dimensions");

  require(static_cast<bool>(std::getline(in, line)), ErrorCode::invalid_argument, "truncated file");
  {
    std::istringstream fields(line);
    for (int64_t k = 0; k < problem.num_vars; ++k) {
      double c;
      require(static_cast<bool>(fields >> c), ErrorCode::invalid_argument,
              "objective line is shorter than the variable count");
      if (c != 0.0) problem.objective.add(static_cast<int32_t>(k), -c);
    }
    problem.objective.normalize();
  }

  problem.cells.resize(static_cast<size_t>(problem.matrix_size) *
                       static_cast<size_t>(problem.matrix_size));
  auto cell_at = [&](int64_t i, int64_t j) -> SdpCell& {
    return problem.cells[static_cast<size_t>(i) * static_cast<size_t>(problem.matrix_size) +
                         static_cast<size_t>(j)];
  };
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    int64_t matno, blkno, i, j;
    double value;
    if (!(fields >> matno)) continue;
    require(static_cast<bool>(fields >> blkno >> i >> j >> value), ErrorCode::invalid_argument,
            "malformed entry line: " + line);
    require(blkno == 1, ErrorCode::invalid_argument, "expected a single block");
    require(i >= 1 && j >= i && j <= problem.matrix_size, ErrorCode::invalid_argument,
            "entry outside the upper triangle: " + line);
    require(matno >= 0 && matno <= problem.num_vars, ErrorCode::invalid_argument,
            "entry matrix index out of range: " + line);
    SdpCell cell;
    if (matno == 0)
      cell.constant = -value;
    else {
      cell.var = static_cast<int32_t>(matno - 1);
      cell.sign = value;
    }
    cell_at(i - 1, j - 1) = cell;
    cell_at(j - 1, i - 1) = cell;
  }
  problem.validate();
  return problem;
}

const char* status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iterations: return "max-iterations";
  }
  return "unknown";
}

namespace {

using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

struct ConeData {
  int64_t n = 0;
  int64_t m = 0;
  RMat constant;                                           // C
  std::vector<std::vector<std::pair<int64_t, int64_t>>> cells;  // E_k supports
  RVec b;
};

ConeData cone_data(const SdpProblem& p) {
  ConeData d;
  d.n = p.matrix_size;
  d.m = p.num_vars;
  d.constant = RMat::Zero(d.n, d.n);
  d.cells.resize(static_cast<size_t>(d.m));
  for (int64_t i = 0; i < d.n; ++i)
    for (int64_t j = 0; j < d.n; ++j) {
      const SdpCell& cell = p.at(i, j);
      if (cell.var >= 0)
        d.cells[static_cast<size_t>(cell.var)].emplace_back(i, j);
      else
        d.constant(i, j) = cell.constant;
    }
  d.b = RVec::Zero(d.m);
  for (const auto& [var, coeff] : p.objective.terms) d.b[var] = coeff;
  return d;
}

// E_k * M summed over the support of E_k; with A_k = -E_k this evaluates
// -A(M).
double support_dot(const std::vector<std::pair<int64_t, int64_t>>& cells, const RMat& mat) {
  double total = 0.0;
  for (const auto& [i, j] : cells) total += mat(i, j);
  return total;
}

RVec apply_e(const ConeData& d, const RMat& mat) {
  RVec out(d.m);
  for (int64_t k = 0; k < d.m; ++k) out[k] = support_dot(d.cells[static_cast<size_t>(k)], mat);
  return out;
}

RMat expand_e(const ConeData& d, const RVec& y) {
  RMat out = RMat::Zero(d.n, d.n);
  for (int64_t k = 0; k < d.m; ++k)
    for (const auto& [i, j] : d.cells[static_cast<size_t>(k)]) out(i, j) += y[k];
  return out;
}

// Writing `m = 0.5 * (m + m.transpose())` would read entries the assignment
// already overwrote; evaluating into a fresh matrix avoids that.
RMat symmetrized(const RMat& m) { return 0.5 * (m + m.transpose()); }

// Largest step alpha <= 1 keeping M + alpha * dM positive definite, shrunk by
// the boundary factor tau.
double max_step(const Eigen::LLT<RMat>& chol, const RMat& dm, double tau) {
  RMat half = chol.matrixL().solve(dm);
  RMat w = chol.matrixL().solve(RMat(half.transpose()));
  double lmin =
      Eigen::SelfAdjointEigenSolver<RMat>(symmetrized(w), Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -tau / lmin);
}

}  // namespace

SolveReport solve(const SdpProblem& problem, const SolveOptions& opts) {
  problem.validate();
  require(problem.matrix_size <= 200, ErrorCode::invalid_argument,
          "matrix size exceeds the solver guard of 200");
  require(problem.num_vars <= 5000, ErrorCode::invalid_argument,
          "variable count exceeds the solver guard of 5000");
  require(opts.max_iter >= 1 && opts.gap_tol > 0, ErrorCode::invalid_argument,
          "bad solver options");

  ConeData d = cone_data(problem);
  const double shift = problem.objective.constant;
  SolveReport report;

  if (d.m == 0) {
    double lmin =
        Eigen::SelfAdjointEigenSolver<RMat>(d.constant, Eigen::EigenvaluesOnly)
            .eigenvalues()
            .minCoeff();
    report.status = lmin >= -1e-10 ? SolveStatus::optimal : SolveStatus::infeasible;
    report.primal_value = report.dual_value = shift;
    return report;
  }

  const int64_t n = d.n;
  const double feas_tol = 1e-8;
  const double tau = 0.98;

  // Maximize b^T y subject to S = C + sum y_k E_k >= 0; primal partner is
  // min C.X subject to E_k.X = -b_k, X >= 0.
  double scale = std::max({10.0, d.constant.norm(), d.b.norm()});
  RMat x = RMat::Identity(n, n) * scale;
  RMat s = RMat::Identity(n, n) * scale;
  RVec y = RVec::Zero(d.m);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    report.iterations = iter;

    RVec rp = -d.b - apply_e(d, x);            // primal residual: E.X - (-b)
    RMat rd = d.constant + expand_e(d, y) - s;  // dual residual: target S
    double mu = x.cwiseProduct(s).sum() / static_cast<double>(n);

    double primal = d.b.dot(y);
    double dual = d.constant.cwiseProduct(x).sum();
    double gap = std::abs(primal - dual) / (1.0 + std::abs(primal) + std::abs(dual));
    double p_res = rp.norm() / (1.0 + d.b.norm());
    double d_res = rd.norm() / (1.0 + d.constant.norm());

    report.primal_value = primal + shift;
    report.dual_value = dual + shift;
    report.gap = std::abs(primal - dual);
    if (p_res <= feas_tol && d_res <= feas_tol && gap <= opts.gap_tol) {
      report.status = SolveStatus::optimal;
      return report;
    }
    if (std::getenv("NPAM_SDP_TRACE"))
      std::fprintf(stderr, "iter %d mu %.3e p_res %.3e d_res %.3e gap %.3e primal %.6f\n", iter,
                   mu, p_res, d_res, gap, primal);
    if (!std::isfinite(mu) || !std::isfinite(primal) || y.norm() > 1e14 || mu > 1e16) {
      report.status = SolveStatus::infeasible;
      return report;
    }

    Eigen::LLT<RMat> xchol(x);
    Eigen::LLT<RMat> schol(s);
    if (xchol.info() != Eigen::Success || schol.info() != Eigen::Success) {
      if (std::getenv("NPAM_SDP_TRACE"))
        std::fprintf(stderr, "iter %d LLT failure (x %d s %d)\n", iter,
                     int(xchol.info() != Eigen::Success), int(schol.info() != Eigen::Success));
      report.status = SolveStatus::infeasible;
      return report;
    }
    RMat sinv = symmetrized(schol.solve(RMat::Identity(n, n)));

    // Schur complement M_kj = tr(E_k X E_j Sinv), symmetric positive definite
    // because the supports are disjoint and X, Sinv are positive definite.
    RMat m(d.m, d.m);
    for (int64_t j = 0; j < d.m; ++j) {
      RMat u = RMat::Zero(n, n);
      for (const auto& [p, q] : d.cells[static_cast<size_t>(j)])
        u += x.col(p) * sinv.row(q);
      for (int64_t k = 0; k <= j; ++k) {
        double v = 0.0;
        for (const auto& [p, q] : d.cells[static_cast<size_t>(k)]) v += u(q, p);
        m(k, j) = v;
        m(j, k) = v;
      }
    }
    Eigen::LDLT<RMat> mfac(m);
    require(mfac.info() == Eigen::Success, ErrorCode::solver_failure,
            "Schur complement factorization failed");

    // Newton system for the complementarity target sigma*mu:
    //   M dy = b + sigma*mu E(Sinv) - E(dXa dSa Sinv) - E(X Rd Sinv),
    //   dS = Rd + expand(dy),
    //   dX = sigma*mu Sinv - X - dXa dSa Sinv - X dS Sinv, symmetrized;
    // the predictor is the sigma = 0, no-corrector instance.
    RVec rhs_base = d.b - apply_e(d, x * rd * sinv);
    RVec e_sinv = apply_e(d, sinv);

    RVec dy_a = mfac.solve(rhs_base);
    RMat ds_a = rd + expand_e(d, dy_a);
    RMat dx_a = symmetrized(-x - x * ds_a * sinv);

    double ap = max_step(xchol, dx_a, tau);
    double ad = max_step(schol, ds_a, tau);
    double mu_aff = (x + ap * dx_a).cwiseProduct(s + ad * ds_a).sum() / static_cast<double>(n);
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

    RMat corr = dx_a * ds_a * sinv;
    RVec dy = mfac.solve(rhs_base + sigma * mu * e_sinv - apply_e(d, corr));
    RMat ds = rd + expand_e(d, dy);
    RMat dx = symmetrized(sigma * mu * sinv - x - corr - x * ds * sinv);

    ap = max_step(xchol, dx, tau);
    ad = max_step(schol, ds, tau);
    x = symmetrized(x + ap * dx);
    y += ad * dy;
    s = symmetrized(s + ad * ds);
  }

  report.status = SolveStatus::max_iterations;
  return report;
}

}  // namespace npam
