#include <doctest.h>

#include "sampling.hpp"
#include "test_support.hpp"

using namespace npam;

TEST_CASE("density matrices are normalized Gram matrices") {
  DensityMatrix one = sample_density_matrix(1, 3);
  CHECK(one.entries(0, 0).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(one.entries(0, 0).imag() == 0.0);

  DensityMatrix rho = sample_density_matrix(8, 7);
  CHECK(rho.dim == 8);
  CHECK(rho.hermiticity_error() == 0.0);
  CHECK(rho.trace_error() <= 1e-13);
  CHECK(rho.min_eigenvalue() >= -1e-12);
  CHECK_NOTHROW(rho.validate());

  CHECK(error_code_of([] { sample_density_matrix(0, 1); }) == ErrorCode::invalid_argument);
}

TEST_CASE("density sampling is deterministic in the seed") {
  DensityMatrix a = sample_density_matrix(4, 42);
  DensityMatrix b = sample_density_matrix(4, 42);
  CHECK((a.entries.array() == b.entries.array()).all());

  DensityMatrix c = sample_density_matrix(4, 43);
  CHECK((a.entries - c.entries).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("projective measurements partition eigenspaces") {
  ProjectorSet halves = sample_projective_measurement(4, 2, 2, 11);
  CHECK(halves.n_outcomes() == 2);
  CHECK(halves.rank_of(0) == 2);
  CHECK(halves.rank_of(1) == 2);
  CHECK_NOTHROW(halves.validate());

  ProjectorSet basis = sample_projective_measurement(3, 1, 3, 5);
  CHECK(basis.n_outcomes() == 3);
  for (int j = 0; j < 3; ++j) CHECK(basis.rank_of(j) == 1);
  CHECK(basis.orthogonality_error() <= 1e-10);

  ProjectorSet lopsided = sample_projective_measurement(6, 2, 2, 9);
  CHECK(lopsided.rank_of(0) == 2);
  CHECK(lopsided.rank_of(1) == 4);
  CHECK_NOTHROW(lopsided.validate());

  CHECK(error_code_of([] { sample_projective_measurement(3, 2, 2, 1); }) ==
        ErrorCode::invalid_argument);
  CHECK(error_code_of([] { sample_projective_measurement(4, 0, 2, 1); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("projector invariants hold across seeds") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    ProjectorSet set = sample_projective_measurement(6, 2, 3, seed);
    CHECK(set.idempotency_error() <= 1e-10);
    CHECK(set.orthogonality_error() <= 1e-10);
    CHECK(set.completeness_error() <= 1e-10);
  }
}

TEST_CASE("realizations wire dimensions from rank and outcome counts") {
  Scenario chsh = make_two_party(2, 2, 2, 2);
  Realization r2 = sample_realization(chsh, 2, 2024);
  CHECK(r2.local_dims == std::vector<int>{4, 4});
  CHECK(r2.state.dim == 16);
  CHECK_NOTHROW(r2.validate());

  Realization r1 = sample_realization(chsh, 1, 2024);
  CHECK(r1.local_dims == std::vector<int>{2, 2});
  CHECK(r1.state.dim == 4);
  CHECK_NOTHROW(r1.validate());

  Realization wide = sample_realization(make_two_party(3, 3, 3, 3), 2, 5);
  CHECK(wide.local_dims == std::vector<int>{6, 6});
  CHECK(wide.state.dim == 36);
  CHECK(wide.measurements[0].size() == 3);
  CHECK(wide.measurements[1].size() == 3);
  CHECK_NOTHROW(wide.validate());
}

TEST_CASE("unequal outcome counts oversize the final projector") {
  Scenario mixed{{{2, 2}, {3, 2}}};
  Realization real = sample_realization(mixed, 2, 77);
  CHECK(real.local_dims == std::vector<int>{4, 6});
  const ProjectorSet& short_setting = real.measurements[1][1];
  CHECK(short_setting.n_outcomes() == 2);
  CHECK(short_setting.rank_of(0) == 2);
  CHECK(short_setting.rank_of(1) == 4);
  CHECK_NOTHROW(real.validate());
}

TEST_CASE("realization sampling is deterministic and sub-seeds are distinct") {
  Scenario chsh = make_two_party(2, 2, 2, 2);
  Realization a = sample_realization(chsh, 2, 99);
  Realization b = sample_realization(chsh, 2, 99);
  CHECK((a.state.entries.array() == b.state.entries.array()).all());
  for (int i = 0; i < 2; ++i)
    for (int x = 0; x < 2; ++x)
      CHECK((a.measurements[i][x].projectors[0].array() ==
             b.measurements[i][x].projectors[0].array())
                .all());

  double closest = 1e30;
  for (int i = 0; i < 2; ++i)
    for (int x = 0; x < 2; ++x)
      for (int j = 0; j < 2; ++j)
        for (int y = 0; y < 2; ++y) {
          if (i == j && x == y) continue;
          closest = std::min(closest, (a.measurements[i][x].projectors[0] -
                                       a.measurements[j][y].projectors[0])
                                          .cwiseAbs()
                                          .maxCoeff());
        }
  CHECK(closest > 1e-3);
}

TEST_CASE("state factor reproduces the state") {
  DensityMatrix rho = sample_density_matrix(9, 31);
  CMat r = state_factor(rho);
  CHECK((r * r.adjoint() - rho.entries).cwiseAbs().maxCoeff() <= 1e-12);
}
