#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "common.hpp"

namespace npam {

// A Bell scenario: outcomes[i][x] is the number of outcomes of party i's
// setting x. Party and setting counts are implied by the nesting.
struct Scenario {
  std::vector<std::vector<int>> outcomes;

  int parties() const { return static_cast<int>(outcomes.size()); }
  int settings(int party) const { return static_cast<int>(outcomes[party].size()); }
  int n_outcomes(int party, int setting) const { return outcomes[party][setting]; }
  int max_outcomes(int party) const {
    return *std::max_element(outcomes[party].begin(), outcomes[party].end());
  }

  void validate() const;
  bool operator==(const Scenario&) const = default;
};

// Uniform two-party scenario (x settings / a outcomes for party A, y / b for B).
Scenario make_two_party(int x_settings, int y_settings, int a_outcomes, int b_outcomes);

// One projector symbol of the reduced alphabet, packed so that the natural
// integer order is (party, setting, outcome) lexicographic. The packing caps
// parties at 4096 and settings/outcomes at 1024, far beyond desk scale.
using Sym = uint32_t;

constexpr Sym make_sym(int party, int setting, int outcome) {
  return (static_cast<Sym>(party) << 20) | (static_cast<Sym>(setting) << 10) |
         static_cast<Sym>(outcome);
}
constexpr int sym_party(Sym s) { return static_cast<int>(s >> 20); }
constexpr int sym_setting(Sym s) { return static_cast<int>((s >> 10) & 0x3ff); }
constexpr int sym_outcome(Sym s) { return static_cast<int>(s & 0x3ff); }

// A word over the reduced alphabet in canonical form, or the absorbing Zero.
// Canonical form: symbols stably sorted by party; within a party no two
// adjacent symbols are equal (idempotency collapsed) and no two adjacent
// symbols share a setting with different outcomes (that product is Zero).
// The empty word is Identity.
class Monomial {
public:
  Monomial() = default;

  static Monomial identity() { return Monomial(); }
  static Monomial zero() {
    Monomial m;
    m.zero_ = true;
    return m;
  }
  static Monomial single(Sym s) {
    Monomial m;
    m.syms_.push_back(s);
    return m;
  }

  bool is_zero() const { return zero_; }
  bool is_identity() const { return !zero_ && syms_.empty(); }
  int size() const { return static_cast<int>(syms_.size()); }
  const std::vector<Sym>& symbols() const { return syms_; }

  bool operator==(const Monomial&) const = default;

  // Graded order: by Zero-ness, then length, then symbol sequence. Used for
  // deterministic basis and document ordering.
  bool operator<(const Monomial& o) const {
    if (zero_ != o.zero_) return o.zero_;
    if (syms_.size() != o.syms_.size()) return syms_.size() < o.syms_.size();
    return syms_ < o.syms_;
  }

  // "A0.1 B2.0" with party letters, "<setting>.<outcome>" per symbol;
  // Identity prints as "1" and Zero as "0".
  std::string str() const;

private:
  friend Monomial canonicalize(std::vector<Sym> raw);
  bool zero_ = false;
  std::vector<Sym> syms_;
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const {
    uint64_t h = m.is_zero() ? 0x5a5a5a5a5a5a5a5aull : 0x243f6a8885a308d3ull;
    for (Sym s : m.symbols()) h = splitmix64(h ^ s);
    return static_cast<size_t>(h);
  }
};

// All retained projector symbols of the scenario, ordered by
// (party, setting, outcome); the final outcome of each setting is eliminated
// through completeness and does not appear.
std::vector<Sym> reduced_alphabet(const Scenario& scenario);

// Rewrite an arbitrary symbol word into canonical form (or Zero).
Monomial canonicalize(std::vector<Sym> raw);

// Hermitian adjoint: reverses each party block. Zero maps to Zero.
Monomial adjoint(const Monomial& m);

// Operator product m1 * m2 in canonical form. Zero absorbs.
Monomial product(const Monomial& m1, const Monomial& m2);

// The maximal single-party sub-sequence of a monomial.
struct Block {
  int party = 0;
  std::vector<Sym> symbols;
  bool operator==(const Block&) const = default;
};

// Party blocks of a non-Zero monomial, in party order; Identity gives none.
std::vector<Block> blocks_of(const Monomial& m);

// Homogeneity test on plain symbol sequences: equal length, equal first and
// last symbols, and equal multisets of consecutive pairs. Works for any
// comparable symbol type so the Monte-Carlo harness can reuse it for abstract
// projector ids.
template <typename T>
bool homogeneous_sequences(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  if (a.front() != b.front() || a.back() != b.back()) return false;
  std::vector<std::pair<T, T>> pa, pb;
  pa.reserve(a.size());
  pb.reserve(b.size());
  for (size_t i = 0; i + 1 < a.size(); ++i) pa.emplace_back(a[i], a[i + 1]);
  for (size_t i = 0; i + 1 < b.size(); ++i) pb.emplace_back(b[i], b[i + 1]);
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  return pa == pb;
}

// Blocks must belong to the same party.
bool is_homogeneous_pair(const Block& a, const Block& b);

// All unordered pairs of distinct simplified sequences over num_symbols
// abstract symbols, of equal length <= max_len, that are homogeneous.
// Sequences are vectors of symbol ids 0..num_symbols-1. Guarded to desk
// scale (max_len <= 8, num_symbols <= 5).
std::vector<std::pair<std::vector<int>, std::vector<int>>> enumerate_homogeneous_pairs(
    int max_len, int num_symbols);

// Hierarchy level: all words of length <= base, plus all words whose party
// block lengths fit one of the extra patterns (pattern[p] = max symbols of
// party p). "1+AB" is base 1 with the single pattern {1,1}.
struct LevelSpec {
  int base = 0;
  std::vector<std::vector<int>> patterns;

  bool operator==(const LevelSpec&) const = default;

  // Longest word the level admits; drives the Result-1 level condition.
  int max_word_length() const;
  std::string str() const;
};

// Parse "3", "1+AB", "2+AAB+ABB", ... Party letters A..Z map to indices 0..25.
LevelSpec parse_level(const std::string& text, int parties);

// All distinct non-Zero canonical monomials admitted by the level, graded
// order, Identity first. Deterministic.
std::vector<Monomial> generate_basis(const Scenario& scenario, const LevelSpec& level);

// Result 1: sampling at this level and rank recovers exactly the algebraic
// constraints iff the level is short, every party has too few independent
// retained projectors, or the rank exceeds one.
bool check_result1(const Scenario& scenario, const LevelSpec& level, int rank);

}  // namespace npam
