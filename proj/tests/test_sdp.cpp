#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "moment.hpp"
#include "sdp.hpp"
#include "test_support.hpp"

using namespace npam;

namespace {

// <A0B0> + <A0B1> + <A1B0> - <A1B1> written over joint probabilities.
BellFunctional chsh_functional() {
  BellFunctional f;
  f.scenario = make_two_party(2, 2, 2, 2);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      double sign = (x == 1 && y == 1) ? -1.0 : 1.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) f.coefficients[{x, y, a, b}] = sign * ((a + b) % 2 ? -1.0 : 1.0);
    }
  return f;
}

SdpProblem chsh_problem(const char* level, const BellFunctional& f) {
  Scenario chsh = make_two_party(2, 2, 2, 2);
  std::vector<Monomial> basis = generate_basis(chsh, parse_level(level, 2));
  return assemble_sdp(algebraic_partition(basis), basis, f);
}

SdpProblem toy_problem() {
  SdpProblem p;
  p.matrix_size = 2;
  p.num_vars = 1;
  p.cells = {{1.0, -1, 0.0}, {0.0, 0, 1.0}, {0.0, 0, 1.0}, {1.0, -1, 0.0}};
  p.objective.add(0, 1.0);
  p.objective.normalize();
  return p;
}

std::string temp_path(const char* name) { return std::string("/tmp/") + name; }

// Joint outcome distribution of a realization, with the eliminated final
// projectors restored through completeness.
double behavior_value(const Realization& real, const BellFunctional& f) {
  std::vector<std::vector<std::vector<CMat>>> full(2);
  for (int p = 0; p < 2; ++p) {
    full[p].resize(real.measurements[p].size());
    for (size_t x = 0; x < real.measurements[p].size(); ++x) {
      const ProjectorSet& set = real.measurements[p][x];
      full[p][x] = set.projectors;
      CMat last = CMat::Identity(set.dim, set.dim);
      for (const CMat& proj : set.projectors) last -= proj;
      full[p][x].push_back(last);
    }
  }
  double total = 0.0;
  for (const auto& [idx, c] : f.coefficients) {
    auto [x, y, a, b] = idx;
    CMat op = kron(full[0][static_cast<size_t>(x)][static_cast<size_t>(a)],
                   full[1][static_cast<size_t>(y)][static_cast<size_t>(b)]);
    total += c * (real.state.entries * op).trace().real();
  }
  return total;
}

}  // namespace

TEST_CASE("affine forms merge and evaluate") {
  AffineForm f;
  f.constant = 0.5;
  f.add(3, 1.0);
  f.add(1, 2.0);
  f.add(3, -1.0);
  f.normalize();
  CHECK(f.terms == std::vector<std::pair<int32_t, double>>{{1, 2.0}});
  CHECK(f.evaluate({0.0, 4.0, 0.0, 9.0}) == doctest::Approx(8.5));
}

TEST_CASE("functional files parse with 1-based indices") {
  std::string path = temp_path("chsh_parse.func");
  {
    std::ofstream out(path);
    out << "# correlator signs\n";
    out << "1 1 1 1  1.0\n";
    out << "1 1 2 2  1.0\n";
    out << "2 2 1 2 -1.0   # cross term\n";
    out << "\n";
  }
  BellFunctional f = parse_bell_functional(path, make_two_party(2, 2, 2, 2));
  CHECK(f.coefficients.size() == 3);
  CHECK(f.coefficients.at({0, 0, 0, 0}) == 1.0);
  CHECK(f.coefficients.at({0, 0, 1, 1}) == 1.0);
  CHECK(f.coefficients.at({1, 1, 0, 1}) == -1.0);

  CHECK(error_code_of([&] { parse_bell_functional("/nonexistent/f.func", f.scenario); }) ==
        ErrorCode::io);

  std::string bad = temp_path("bad.func");
  {
    std::ofstream out(bad);
    out << "1 1 1\n";
  }
  CHECK(error_code_of([&] { parse_bell_functional(bad, f.scenario); }) == ErrorCode::io);

  std::string range = temp_path("range.func");
  {
    std::ofstream out(range);
    out << "3 1 1 1 1.0\n";
  }
  CHECK(error_code_of([&] { parse_bell_functional(range, f.scenario); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("behavior forms follow measurement completeness") {
  Scenario chsh = make_two_party(2, 2, 2, 2);
  std::vector<Monomial> basis = generate_basis(chsh, parse_level("1", 2));
  EqualityPartition part = algebraic_partition(basis);
  BehaviorMap map = behavior_map(chsh, basis, part);

  const AffineForm& joint = map.at(0, 0, 0, 0);
  CHECK(joint.constant == 0.0);
  CHECK(joint.terms.size() == 1);
  CHECK(joint.terms[0].second == 1.0);

  const AffineForm& last = map.at(0, 0, 1, 1);
  CHECK(last.constant == 1.0);
  CHECK(last.terms.size() == 3);

  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      AffineForm total;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) total.add(map.at(x, y, a, b), 1.0);
      total.normalize();
      CHECK(total.constant == 1.0);
      CHECK(total.terms.empty());
    }

  std::vector<Monomial> tiny = {Monomial::identity()};
  try {
    behavior_map(chsh, tiny, algebraic_partition(tiny));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
    CHECK(std::string(e.what()).find("A0.0") != std::string::npos);
  }
}

TEST_CASE("assembly exposes one variable per free orbit") {
  BellFunctional zero;
  zero.scenario = make_two_party(2, 2, 2, 2);
  SdpProblem p = chsh_problem("1+AB", zero);
  CHECK(p.matrix_size == 9);
  CHECK(p.num_vars == 16);
  CHECK(p.objective == AffineForm{});
  CHECK(p.at(0, 0).var == -1);
  CHECK(p.at(0, 0).constant == 1.0);

  SdpProblem q = chsh_problem("1+AB", chsh_functional());
  CHECK(q.num_vars == 16);
  CHECK_FALSE(q.objective.terms.empty());
}

TEST_CASE("a two-by-two correlation matrix maximizes at unit off-diagonal") {
  SdpProblem p = toy_problem();
  SolveReport r = solve(p);
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.primal_value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(r.primal_value - r.dual_value) <= 1e-6);
}

TEST_CASE("sdpa export writes the documented field layout") {
  std::string path = temp_path("toy.dat-s");
  export_sdpa(toy_problem(), path);

  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '*') lines.push_back(line);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "1");
  CHECK(lines[1] == "1");
  CHECK(lines[2] == "2");
  CHECK(lines[3] == "-1");
  CHECK(lines[4] == "0 1 1 1 -1");
  CHECK(lines[5] == "1 1 1 2 1");
  CHECK(lines[6] == "0 1 2 2 -1");

  CHECK(import_sdpa(path) == toy_problem());
}

TEST_CASE("export and import round-trip the assembled problem") {
  SdpProblem p = chsh_problem("1+AB", chsh_functional());
  std::string path = temp_path("chsh_roundtrip.dat-s");
  export_sdpa(p, path);
  CHECK(import_sdpa(path) == p);

  CHECK(error_code_of([&] { export_sdpa(p, "/nonexistent/dir/x.dat-s"); }) == ErrorCode::io);
  CHECK(error_code_of([] { import_sdpa("/nonexistent/x.dat-s"); }) == ErrorCode::io);
}

TEST_CASE("the CHSH relaxation reaches the quantum bound") {
  const double bound = 2.0 * std::sqrt(2.0);
  for (const char* level : {"1", "1+AB"}) {
    SdpProblem p = chsh_problem(level, chsh_functional());
    SolveReport r = solve(p);
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.primal_value == doctest::Approx(bound).epsilon(1e-4));
    CHECK(r.iterations < 200);
  }
}

TEST_CASE("relaxation levels tighten monotonically") {
  std::vector<double> values;
  for (const char* level : {"1", "1+AB", "2", "3"}) {
    SolveReport r = solve(chsh_problem(level, chsh_functional()));
    REQUIRE(r.status == SolveStatus::optimal);
    values.push_back(r.primal_value);
  }
  for (size_t k = 1; k < values.size(); ++k) CHECK(values[k] <= values[k - 1] + 1e-7);
}

TEST_CASE("membership problems solve to zero") {
  BellFunctional zero;
  zero.scenario = make_two_party(2, 2, 2, 2);
  SolveReport r = solve(chsh_problem("1+AB", zero));
  CHECK(r.status == SolveStatus::optimal);
  CHECK(std::abs(r.primal_value) <= 1e-6);
}

TEST_CASE("scaling the functional scales the optimum") {
  BellFunctional f = chsh_functional();
  for (auto& [idx, c] : f.coefficients) c *= 3.0;
  SolveReport r = solve(chsh_problem("1+AB", f));
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.primal_value == doctest::Approx(3.0 * 2.0 * std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("sampled realizations stay inside the relaxation") {
  BellFunctional f = chsh_functional();
  SdpProblem p = chsh_problem("1+AB", f);
  SolveReport r = solve(p);
  REQUIRE(r.status == SolveStatus::optimal);
  Scenario chsh = make_two_party(2, 2, 2, 2);
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Realization real = sample_realization(chsh, 2, seed);
    CHECK(behavior_value(real, f) <= r.primal_value + 1e-6);
  }
}

TEST_CASE("constant problems short-circuit on definiteness") {
  SdpProblem fixed;
  fixed.matrix_size = 2;
  fixed.num_vars = 0;
  fixed.cells = {{1.0, -1, 0.0}, {2.0, -1, 0.0}, {2.0, -1, 0.0}, {1.0, -1, 0.0}};
  CHECK(solve(fixed).status == SolveStatus::infeasible);

  fixed.cells[1].constant = 0.0;
  fixed.cells[2].constant = 0.0;
  SolveReport r = solve(fixed);
  CHECK(r.status == SolveStatus::optimal);
  CHECK(r.primal_value == 0.0);
}

TEST_CASE("solver enforces its guards and iteration cap") {
  SdpProblem big = toy_problem();
  big.num_vars = 5001;
  CHECK(error_code_of([&] { solve(big); }) == ErrorCode::invalid_argument);

  SolveOptions opts;
  opts.max_iter = 2;
  SolveReport r = solve(chsh_problem("1+AB", chsh_functional()), opts);
  CHECK(r.status == SolveStatus::max_iterations);
  CHECK(r.iterations == 2);

  opts.max_iter = 0;
  CHECK(error_code_of([&] { solve(toy_problem(), opts); }) == ErrorCode::invalid_argument);
}
