#include "partition.hpp"

#include <unordered_map>

namespace npam {

void EqualityPartition::validate() const {
  size_t n = static_cast<size_t>(basis_size);
  require(class_of.size() == n * n, ErrorCode::internal, "partition table size mismatch");
  require(num_classes > 0, ErrorCode::internal, "partition without classes");
  require(conjugate_pairing.size() == static_cast<size_t>(num_classes), ErrorCode::internal,
          "pairing size mismatch");
  for (int32_t c : class_of)
    require(c >= 0 && c < num_classes, ErrorCode::internal, "class id out of range");
  for (int32_t c = 0; c < num_classes; ++c) {
    int32_t p = conjugate_pairing[static_cast<size_t>(c)];
    require(p >= 0 && p < num_classes && conjugate_pairing[static_cast<size_t>(p)] == c,
            ErrorCode::internal, "conjugate pairing is not an involution");
  }
  require(unit_class == class_of[0], ErrorCode::internal, "unit class must hold cell (0,0)");
  require(conjugate_pairing[static_cast<size_t>(unit_class)] == unit_class, ErrorCode::internal,
          "unit class must be self-paired");
  if (zero_class >= 0)
    require(conjugate_pairing[static_cast<size_t>(zero_class)] == zero_class, ErrorCode::internal,
            "zero class must be self-paired");
}

CountConvention default_convention() { return CountConvention::merged_exclude_zero; }

CountConvention parse_convention(const std::string& name) {
  if (name == "all") return CountConvention::all_classes;
  if (name == "nonzero") return CountConvention::exclude_zero;
  if (name == "free") return CountConvention::exclude_zero_and_unit;
  if (name == "merged") return CountConvention::merged;
  if (name == "merged-nonzero") return CountConvention::merged_exclude_zero;
  if (name == "merged-free") return CountConvention::merged_exclude_zero_and_unit;
  fail(ErrorCode::invalid_argument,
       "unknown counting convention '" + name +
           "' (expected all, nonzero, free, merged, merged-nonzero, merged-free)");
}

std::string convention_name(CountConvention c) {
  switch (c) {
    case CountConvention::all_classes: return "all";
    case CountConvention::exclude_zero: return "nonzero";
    case CountConvention::exclude_zero_and_unit: return "free";
    case CountConvention::merged: return "merged";
    case CountConvention::merged_exclude_zero: return "merged-nonzero";
    case CountConvention::merged_exclude_zero_and_unit: return "merged-free";
  }
  fail(ErrorCode::internal, "unhandled convention");
}

int64_t count_unique(const EqualityPartition& p, CountConvention convention) {
  bool merged = convention == CountConvention::merged ||
                convention == CountConvention::merged_exclude_zero ||
                convention == CountConvention::merged_exclude_zero_and_unit;
  bool drop_zero = convention != CountConvention::all_classes && convention != CountConvention::merged;
  bool drop_unit = convention == CountConvention::exclude_zero_and_unit ||
                   convention == CountConvention::merged_exclude_zero_and_unit;

  int64_t count = 0;
  for (int32_t c = 0; c < p.num_classes; ++c) {
    if (drop_zero && c == p.zero_class) continue;
    if (drop_unit && c == p.unit_class) continue;
    if (merged && p.conjugate_pairing[static_cast<size_t>(c)] < c) continue;
    ++count;
  }
  return count;
}

ComparisonReport compare_partitions(const EqualityPartition& sampled,
                                    const EqualityPartition& algebraic) {
  require(sampled.basis_size == algebraic.basis_size, ErrorCode::invalid_argument,
          "compared partitions must share one basis");
  ComparisonReport report;
  report.classes_sampled = sampled.num_classes;
  report.classes_algebraic = algebraic.num_classes;

  // For each algebraic class, the sampled classes its cells land in;
  // for each sampled class, the algebraic classes it covers.
  std::vector<std::vector<int32_t>> sampled_of_algebraic(
      static_cast<size_t>(algebraic.num_classes));
  std::vector<std::vector<int32_t>> algebraic_of_sampled(static_cast<size_t>(sampled.num_classes));
  size_t cells = sampled.class_of.size();
  for (size_t cell = 0; cell < cells; ++cell) {
    int32_t sc = sampled.class_of[cell];
    int32_t ac = algebraic.class_of[cell];
    auto& sl = sampled_of_algebraic[static_cast<size_t>(ac)];
    if (std::find(sl.begin(), sl.end(), sc) == sl.end()) sl.push_back(sc);
    auto& al = algebraic_of_sampled[static_cast<size_t>(sc)];
    if (std::find(al.begin(), al.end(), ac) == al.end()) al.push_back(ac);
  }

  for (int32_t ac = 0; ac < algebraic.num_classes; ++ac)
    if (sampled_of_algebraic[static_cast<size_t>(ac)].size() > 1) report.splits.push_back(ac);
  for (int32_t sc = 0; sc < sampled.num_classes; ++sc) {
    auto& covered = algebraic_of_sampled[static_cast<size_t>(sc)];
    if (covered.size() > 1) {
      std::sort(covered.begin(), covered.end());
      for (size_t k = 1; k < covered.size(); ++k)
        report.merges.emplace_back(covered[0], covered[k]);
    }
  }
  std::sort(report.merges.begin(), report.merges.end());
  report.refinement = report.splits.empty();
  report.equal = report.splits.empty() && report.merges.empty();
  return report;
}

EqualityPartition finalize_partition(int32_t basis_size, const std::vector<int32_t>& raw_labels,
                                     int32_t raw_zero_label) {
  size_t n = static_cast<size_t>(basis_size);
  require(raw_labels.size() == n * n, ErrorCode::internal, "label table size mismatch");

  EqualityPartition out;
  out.basis_size = basis_size;
  out.class_of.resize(n * n);
  std::unordered_map<int32_t, int32_t> renumber;
  for (size_t cell = 0; cell < raw_labels.size(); ++cell) {
    auto [it, fresh] =
        renumber.try_emplace(raw_labels[cell], static_cast<int32_t>(renumber.size()));
    out.class_of[cell] = it->second;
  }
  out.num_classes = static_cast<int32_t>(renumber.size());
  out.unit_class = out.class_of[0];
  if (raw_zero_label >= 0) {
    auto it = renumber.find(raw_zero_label);
    out.zero_class = it == renumber.end() ? -1 : it->second;
  }

  out.conjugate_pairing.assign(static_cast<size_t>(out.num_classes), -1);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      int32_t c = out.class_of[i * n + j];
      int32_t t = out.class_of[j * n + i];
      int32_t& slot = out.conjugate_pairing[static_cast<size_t>(c)];
      if (slot == -1)
        slot = t;
      else
        require(slot == t, ErrorCode::internal,
                "transpose does not map classes consistently; caller broke Hermitian symmetry");
    }
  out.validate();
  return out;
}

EqualityPartition algebraic_partition(const std::vector<Monomial>& basis) {
  require(!basis.empty() && basis[0].is_identity(), ErrorCode::invalid_argument,
          "basis must start with Identity");
  int32_t n = static_cast<int32_t>(basis.size());

  std::vector<Monomial> adjoints;
  adjoints.reserve(basis.size());
  for (const Monomial& m : basis) adjoints.push_back(adjoint(m));

  // Intern each cell's canonical product; id 0 is reserved for Zero.
  std::unordered_map<Monomial, int32_t, MonomialHash> ids;
  ids.emplace(Monomial::zero(), 0);
  std::vector<int32_t> labels(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int32_t i = 0; i < n; ++i)
    for (int32_t j = 0; j < n; ++j) {
      Monomial prod = product(adjoints[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
      auto [it, fresh] = ids.try_emplace(std::move(prod), static_cast<int32_t>(ids.size()));
      labels[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
          it->second;
    }
  return finalize_partition(n, labels, 0);
}

}  // namespace npam
