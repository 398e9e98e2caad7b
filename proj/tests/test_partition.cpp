#include <doctest.h>

#include "partition.hpp"
#include "test_support.hpp"

using namespace npam;

namespace {

EqualityPartition chsh_partition(const std::string& level) {
  Scenario chsh = make_two_party(2, 2, 2, 2);
  return algebraic_partition(generate_basis(chsh, parse_level(level, 2)));
}

}  // namespace

TEST_CASE("algebraic partition of the level-1 moment matrix") {
  EqualityPartition p = chsh_partition("1");
  CHECK(p.basis_size == 5);
  CHECK(p.num_classes == 13);
  CHECK(p.zero_class == -1);
  CHECK(p.unit_class == 0);
  CHECK(count_unique(p, CountConvention::all_classes) == 13);
  CHECK(count_unique(p, CountConvention::merged) == 11);
  CHECK(count_unique(p, CountConvention::merged_exclude_zero_and_unit) == 10);
}

TEST_CASE("algebraic partition counts across levels") {
  EqualityPartition hybrid = chsh_partition("1+AB");
  CHECK(hybrid.basis_size == 9);
  CHECK(count_unique(hybrid, CountConvention::all_classes) == 25);
  CHECK(count_unique(hybrid, CountConvention::merged) == 17);
  CHECK(count_unique(hybrid, CountConvention::merged_exclude_zero_and_unit) == 16);

  EqualityPartition l2 = chsh_partition("2");
  CHECK(l2.basis_size == 13);
  CHECK(count_unique(l2, CountConvention::all_classes) == 41);
  CHECK(count_unique(l2, CountConvention::merged) == 31);

  EqualityPartition l3 = chsh_partition("3");
  CHECK(l3.basis_size == 25);
  CHECK(count_unique(l3, CountConvention::all_classes) == 85);
  CHECK(count_unique(l3, CountConvention::merged) == 61);
}

TEST_CASE("orthogonal outcome pairs produce a zero class") {
  Scenario s = make_two_party(2, 2, 2, 3);
  EqualityPartition p = algebraic_partition(generate_basis(s, parse_level("1", 2)));
  CHECK(p.basis_size == 7);
  CHECK(p.zero_class >= 0);
  CHECK(p.conjugate_pairing[static_cast<size_t>(p.zero_class)] == p.zero_class);
  CHECK(count_unique(p, CountConvention::all_classes) ==
        count_unique(p, CountConvention::exclude_zero) + 1);
  CHECK(count_unique(p, CountConvention::exclude_zero) ==
        count_unique(p, CountConvention::exclude_zero_and_unit) + 1);
}

TEST_CASE("partitions respect Hermitian symmetry") {
  for (const char* level : {"1", "1+AB", "2"}) {
    EqualityPartition p = chsh_partition(level);
    p.validate();
    for (int32_t i = 0; i < p.basis_size; ++i)
      for (int32_t j = 0; j < p.basis_size; ++j)
        CHECK(p.conjugate_pairing[static_cast<size_t>(p.at(i, j))] == p.at(j, i));
  }
}

TEST_CASE("class ids are canonical by first row-major occurrence") {
  EqualityPartition p = finalize_partition(2, {7, 3, 3, 9}, 9);
  CHECK(p.num_classes == 3);
  CHECK(p.class_of == std::vector<int32_t>{0, 1, 1, 2});
  CHECK(p.unit_class == 0);
  CHECK(p.zero_class == 2);
  CHECK(p.conjugate_pairing == std::vector<int32_t>{0, 1, 2});

  EqualityPartition q = finalize_partition(2, {5, 1, 2, 5}, -1);
  CHECK(q.num_classes == 3);
  CHECK(q.class_of == std::vector<int32_t>{0, 1, 2, 0});
  CHECK(q.zero_class == -1);
  CHECK(q.conjugate_pairing == std::vector<int32_t>{0, 2, 1});

  CHECK(error_code_of([] { finalize_partition(2, {0, 1, 2}, -1); }) == ErrorCode::internal);
  CHECK(error_code_of([] {
          finalize_partition(3, {0, 1, 1, 2, 0, 4, 3, 5, 0}, -1);
        }) == ErrorCode::internal);
}

TEST_CASE("comparison reports merges and splits against the reference") {
  EqualityPartition reference = finalize_partition(2, {0, 1, 2, 3}, -1);
  EqualityPartition merged = finalize_partition(2, {0, 1, 1, 2}, -1);

  ComparisonReport same = compare_partitions(reference, reference);
  CHECK(same.equal);
  CHECK(same.refinement);
  CHECK(same.merges.empty());
  CHECK(same.splits.empty());

  ComparisonReport coarsened = compare_partitions(merged, reference);
  CHECK_FALSE(coarsened.equal);
  CHECK(coarsened.refinement);
  CHECK(coarsened.classes_sampled == 3);
  CHECK(coarsened.classes_algebraic == 4);
  CHECK(coarsened.merges == std::vector<std::pair<int32_t, int32_t>>{{1, 2}});
  CHECK(coarsened.splits.empty());

  ComparisonReport torn = compare_partitions(reference, merged);
  CHECK_FALSE(torn.refinement);
  CHECK(torn.splits == std::vector<int32_t>{1});

  EqualityPartition other_size = finalize_partition(1, {0}, -1);
  CHECK(error_code_of([&] { compare_partitions(reference, other_size); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("counting conventions parse and print") {
  for (CountConvention c :
       {CountConvention::all_classes, CountConvention::exclude_zero,
        CountConvention::exclude_zero_and_unit, CountConvention::merged,
        CountConvention::merged_exclude_zero, CountConvention::merged_exclude_zero_and_unit})
    CHECK(parse_convention(convention_name(c)) == c);
  CHECK(error_code_of([] { parse_convention("bogus"); }) == ErrorCode::invalid_argument);
  CHECK(default_convention() == CountConvention::merged_exclude_zero);
  CHECK(count_unique(chsh_partition("3"), default_convention()) == 61);
}

TEST_CASE("level-3 distinct-entry counts for wider scenarios") {
  auto count = [](int x, int y, int a, int b) {
    Scenario s = make_two_party(x, y, a, b);
    return count_unique(algebraic_partition(generate_basis(s, parse_level("3", 2))),
                        default_convention());
  };
  CHECK(count(2, 2, 2, 3) == 422);
  CHECK(count(2, 3, 2, 2) == 319);
  CHECK(count(3, 3, 2, 2) == 868);
}

TEST_CASE("single-cell matrix forms one unit class") {
  EqualityPartition p = algebraic_partition({Monomial::identity()});
  CHECK(p.basis_size == 1);
  CHECK(p.num_classes == 1);
  CHECK(p.unit_class == 0);
  CHECK(p.zero_class == -1);
  CHECK(count_unique(p, CountConvention::all_classes) == 1);
}
