#include "scenario.hpp"

#include <unordered_set>

namespace npam {

void Scenario::validate() const {
  require(!outcomes.empty(), ErrorCode::invalid_argument, "scenario needs at least one party");
  require(outcomes.size() <= 4096, ErrorCode::invalid_argument, "too many parties");
  for (size_t i = 0; i < outcomes.size(); ++i) {
    require(!outcomes[i].empty(), ErrorCode::invalid_argument,
            "party " + std::to_string(i) + " needs at least one setting");
    require(outcomes[i].size() <= 1024, ErrorCode::invalid_argument, "too many settings");
    for (int n : outcomes[i])
      require(n >= 2 && n <= 1024, ErrorCode::invalid_argument,
              "every setting needs between 2 and 1024 outcomes");
  }
}

Scenario make_two_party(int x_settings, int y_settings, int a_outcomes, int b_outcomes) {
  Scenario s;
  s.outcomes.resize(2);
  s.outcomes[0].assign(static_cast<size_t>(std::max(x_settings, 0)), a_outcomes);
  s.outcomes[1].assign(static_cast<size_t>(std::max(y_settings, 0)), b_outcomes);
  s.validate();
  return s;
}

std::string Monomial::str() const {
  if (zero_) return "0";
  if (syms_.empty()) return "1";
  std::string out;
  for (Sym s : syms_) {
    if (!out.empty()) out += ' ';
    int party = sym_party(s);
    if (party < 26) {
      out += static_cast<char>('A' + party);
    } else {
      out += 'P';
      out += std::to_string(party);
      out += ':';
    }
    out += std::to_string(sym_setting(s));
    out += '.';
    out += std::to_string(sym_outcome(s));
  }
  return out;
}

std::vector<Sym> reduced_alphabet(const Scenario& scenario) {
  scenario.validate();
  std::vector<Sym> out;
  for (int i = 0; i < scenario.parties(); ++i)
    for (int x = 0; x < scenario.settings(i); ++x)
      for (int a = 0; a < scenario.n_outcomes(i, x) - 1; ++a)
        out.push_back(make_sym(i, x, a));
  return out;
}

Monomial canonicalize(std::vector<Sym> raw) {
  // Cross-party commutation: sort by party only, keeping within-party order.
  std::stable_sort(raw.begin(), raw.end(),
                   [](Sym a, Sym b) { return sym_party(a) < sym_party(b); });
  Monomial m;
  m.syms_.reserve(raw.size());
  for (Sym s : raw) {
    if (!m.syms_.empty()) {
      Sym top = m.syms_.back();
      if (top == s) continue;  // P*P = P
      if (sym_party(top) == sym_party(s) && sym_setting(top) == sym_setting(s))
        return Monomial::zero();  // orthogonal outcomes of one setting
    }
    m.syms_.push_back(s);
  }
  return m;
}

Monomial adjoint(const Monomial& m) {
  if (m.is_zero()) return m;
  std::vector<Sym> rev(m.symbols().rbegin(), m.symbols().rend());
  return canonicalize(std::move(rev));
}

Monomial product(const Monomial& m1, const Monomial& m2) {
  if (m1.is_zero() || m2.is_zero()) return Monomial::zero();
  std::vector<Sym> cat;
  cat.reserve(m1.symbols().size() + m2.symbols().size());
  cat.insert(cat.end(), m1.symbols().begin(), m1.symbols().end());
  cat.insert(cat.end(), m2.symbols().begin(), m2.symbols().end());
  return canonicalize(std::move(cat));
}

std::vector<Block> blocks_of(const Monomial& m) {
  require(!m.is_zero(), ErrorCode::invalid_argument, "Zero has no block decomposition");
  std::vector<Block> out;
  for (Sym s : m.symbols()) {
    if (out.empty() || out.back().party != sym_party(s))
      out.push_back(Block{sym_party(s), {}});
    out.back().symbols.push_back(s);
  }
  return out;
}

bool is_homogeneous_pair(const Block& a, const Block& b) {
  require(a.party == b.party, ErrorCode::invalid_argument,
          "homogeneity compares blocks of one party");
  return homogeneous_sequences(a.symbols, b.symbols);
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> enumerate_homogeneous_pairs(
    int max_len, int num_symbols) {
  require(max_len >= 1 && max_len <= 8, ErrorCode::invalid_argument,
          "enumerate_homogeneous_pairs supports max_len 1..8");
  require(num_symbols >= 1 && num_symbols <= 5, ErrorCode::invalid_argument,
          "enumerate_homogeneous_pairs supports num_symbols 1..5");

  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  std::vector<std::vector<int>> current, next;
  for (int len = 1; len <= max_len; ++len) {
    // Extend all simplified sequences by one non-repeating symbol.
    next.clear();
    if (len == 1) {
      for (int s = 0; s < num_symbols; ++s) next.push_back({s});
    } else {
      for (const auto& seq : current)
        for (int s = 0; s < num_symbols; ++s) {
          if (s == seq.back()) continue;
          next.push_back(seq);
          next.back().push_back(s);
        }
    }
    current = next;
    // Group by the homogeneity signature; every in-group pair qualifies.
    std::map<std::tuple<int, int, std::vector<std::pair<int, int>>>, std::vector<size_t>> groups;
    for (size_t idx = 0; idx < current.size(); ++idx) {
      const auto& seq = current[idx];
      std::vector<std::pair<int, int>> sorted_pairs;
      for (size_t i = 0; i + 1 < seq.size(); ++i) sorted_pairs.emplace_back(seq[i], seq[i + 1]);
      std::sort(sorted_pairs.begin(), sorted_pairs.end());
      groups[{seq.front(), seq.back(), std::move(sorted_pairs)}].push_back(idx);
    }
    for (const auto& [sig, members] : groups)
      for (size_t i = 0; i < members.size(); ++i)
        for (size_t j = i + 1; j < members.size(); ++j)
          pairs.emplace_back(current[members[i]], current[members[j]]);
  }
  return pairs;
}

int LevelSpec::max_word_length() const {
  int longest = base;
  for (const auto& pattern : patterns) {
    int total = 0;
    for (int c : pattern) total += c;
    longest = std::max(longest, total);
  }
  return longest;
}

std::string LevelSpec::str() const {
  std::string out = std::to_string(base);
  for (const auto& pattern : patterns) {
    out += '+';
    for (size_t p = 0; p < pattern.size(); ++p)
      for (int c = 0; c < pattern[p]; ++c) out += static_cast<char>('A' + p);
  }
  return out;
}

LevelSpec parse_level(const std::string& text, int parties) {
  LevelSpec level;
  size_t pos = 0;
  require(!text.empty(), ErrorCode::invalid_argument, "empty level string");
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
  require(pos > 0, ErrorCode::invalid_argument, "level must start with a base number: " + text);
  level.base = std::stoi(text.substr(0, pos));
  while (pos < text.size()) {
    require(text[pos] == '+', ErrorCode::invalid_argument, "malformed level string: " + text);
    ++pos;
    std::vector<int> pattern(static_cast<size_t>(parties), 0);
    size_t letters = 0;
    while (pos < text.size() && text[pos] != '+') {
      char c = text[pos];
      require(c >= 'A' && c <= 'Z', ErrorCode::invalid_argument,
              "level patterns use party letters A..Z: " + text);
      int party = c - 'A';
      require(party < parties, ErrorCode::invalid_argument,
              std::string("level pattern letter ") + c + " exceeds party count");
      ++pattern[static_cast<size_t>(party)];
      ++letters;
      ++pos;
    }
    require(letters > 0, ErrorCode::invalid_argument, "empty level pattern: " + text);
    level.patterns.push_back(std::move(pattern));
  }
  return level;
}

namespace {

// All simplified single-party sequences over `symbols` with length <= max_len
// (including the empty sequence).
std::vector<std::vector<Sym>> party_sequences(const std::vector<Sym>& symbols, int max_len) {
  std::vector<std::vector<Sym>> out = {{}};
  std::vector<std::vector<Sym>> frontier = {{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<Sym>> next;
    for (const auto& seq : frontier)
      for (Sym s : symbols) {
        if (!seq.empty()) {
          Sym top = seq.back();
          if (top == s || sym_setting(top) == sym_setting(s)) continue;
        }
        next.push_back(seq);
        next.back().push_back(s);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

std::vector<Monomial> generate_basis(const Scenario& scenario, const LevelSpec& level) {
  scenario.validate();
  require(level.base >= 0, ErrorCode::invalid_argument, "negative level");
  for (const auto& pattern : level.patterns)
    require(static_cast<int>(pattern.size()) == scenario.parties(), ErrorCode::invalid_argument,
            "level pattern does not match party count");

  std::vector<Sym> alphabet = reduced_alphabet(scenario);
  std::unordered_set<Monomial, MonomialHash> seen;
  seen.insert(Monomial::identity());

  // Base level: breadth-first products; every canonical word of length k is a
  // one-symbol extension of a canonical word of length k-1.
  std::vector<Monomial> frontier = {Monomial::identity()};
  for (int len = 1; len <= level.base; ++len) {
    std::vector<Monomial> next;
    for (const Monomial& m : frontier)
      for (Sym s : alphabet) {
        Monomial ext = product(m, Monomial::single(s));
        if (ext.is_zero() || ext.size() != len) continue;
        if (seen.insert(ext).second) next.push_back(std::move(ext));
      }
    frontier = std::move(next);
  }

  // Extra patterns: direct product of per-party simplified sequences whose
  // lengths fit the pattern.
  for (const auto& pattern : level.patterns) {
    std::vector<std::vector<std::vector<Sym>>> per_party;
    for (int p = 0; p < scenario.parties(); ++p) {
      std::vector<Sym> party_alphabet;
      for (Sym s : alphabet)
        if (sym_party(s) == p) party_alphabet.push_back(s);
      per_party.push_back(party_sequences(party_alphabet, pattern[static_cast<size_t>(p)]));
    }
    std::vector<Sym> word;
    // Odometer over the per-party sequence choices.
    std::vector<size_t> pick(per_party.size(), 0);
    while (true) {
      word.clear();
      for (size_t p = 0; p < per_party.size(); ++p)
        word.insert(word.end(), per_party[p][pick[p]].begin(), per_party[p][pick[p]].end());
      Monomial m = canonicalize(word);
      if (!m.is_zero()) seen.insert(std::move(m));
      size_t p = 0;
      while (p < pick.size() && ++pick[p] == per_party[p].size()) pick[p++] = 0;
      if (p == pick.size()) break;
    }
  }

  std::vector<Monomial> basis(seen.begin(), seen.end());
  std::sort(basis.begin(), basis.end());
  return basis;
}

bool check_result1(const Scenario& scenario, const LevelSpec& level, int rank) {
  scenario.validate();
  require(rank >= 1, ErrorCode::invalid_argument, "rank must be positive");
  if (rank > 1) return true;
  if (level.max_word_length() < 3) return true;
  for (int i = 0; i < scenario.parties(); ++i)
    if (scenario.settings(i) * (scenario.max_outcomes(i) - 1) >= 3) return false;
  return true;
}

}  // namespace npam
