#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scenario.hpp"

namespace npam {

// Equivalence classes over the N*N cells of a moment matrix: the constraint
// structure. Class ids are canonical (ordered by each class's first cell in
// row-major order), so equal partitions have equal representations.
struct EqualityPartition {
  int32_t basis_size = 0;
  int32_t num_classes = 0;
  std::vector<int32_t> class_of;          // row-major, size N*N
  int32_t zero_class = -1;                // -1 when no cell is forced zero
  int32_t unit_class = 0;                 // class of cell (0,0)
  std::vector<int32_t> conjugate_pairing; // involution; pairing[class(i,j)] = class(j,i)

  int32_t at(int32_t i, int32_t j) const {
    return class_of[static_cast<size_t>(i) * static_cast<size_t>(basis_size) +
                    static_cast<size_t>(j)];
  }
  bool operator==(const EqualityPartition&) const = default;
  void validate() const;
};

// Candidate counting conventions for "number of distinct entries". The
// shipped default is calibrated against the level-3 reference counts (see
// default_convention()).
enum class CountConvention {
  all_classes,                   // every class, ZERO and UNIT included
  exclude_zero,                  // drop the ZERO class
  exclude_zero_and_unit,         // drop ZERO and UNIT
  merged,                        // conjugate-paired classes count once
  merged_exclude_zero,           // as merged, ZERO dropped
  merged_exclude_zero_and_unit,  // as merged, ZERO and UNIT dropped
};

CountConvention default_convention();
CountConvention parse_convention(const std::string& name);
std::string convention_name(CountConvention c);

int64_t count_unique(const EqualityPartition& p, CountConvention convention);

// How a sampled partition relates to the algebraic reference. `merges` holds
// one reference-class pair per extra equality (a sampled class covering k
// reference classes contributes k-1 pairs against the lowest id). `splits`
// lists reference classes torn across sampled classes, which indicates a
// tolerance failure and should stay empty.
struct ComparisonReport {
  int32_t classes_sampled = 0;
  int32_t classes_algebraic = 0;
  bool refinement = false;  // sampled partition only coarsens the reference
  bool equal = false;
  std::vector<std::pair<int32_t, int32_t>> merges;
  std::vector<int32_t> splits;
};

ComparisonReport compare_partitions(const EqualityPartition& sampled,
                                    const EqualityPartition& algebraic);

// The purely symbolic constraint oracle: cells share a class iff their
// canonical products adjoint(S_i) * S_j coincide; Zero products form the ZERO
// class; cell (0,0) is the UNIT class.
EqualityPartition algebraic_partition(const std::vector<Monomial>& basis);

// Plain union-find over dense ids.
class UnionFind {
public:
  explicit UnionFind(size_t n) : parent_(n) {
    for (size_t i = 0; i < n; ++i) parent_[i] = static_cast<int32_t>(i);
  }
  int32_t find(int32_t x) {
    int32_t root = x;
    while (parent_[static_cast<size_t>(root)] != root) root = parent_[static_cast<size_t>(root)];
    while (parent_[static_cast<size_t>(x)] != root) {
      int32_t next = parent_[static_cast<size_t>(x)];
      parent_[static_cast<size_t>(x)] = root;
      x = next;
    }
    return root;
  }
  void unite(int32_t a, int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }

private:
  std::vector<int32_t> parent_;
};

// Renumber arbitrary dense labels over the N*N cell grid into canonical class
// ids (first occurrence in row-major order gets the next id). The conjugate
// pairing is read off the transpose, which every caller guarantees
// structurally; a violation is an internal error.
EqualityPartition finalize_partition(int32_t basis_size, const std::vector<int32_t>& raw_labels,
                                     int32_t raw_zero_label);

}  // namespace npam
