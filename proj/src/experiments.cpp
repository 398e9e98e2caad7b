#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "sampling.hpp"

namespace npam {

namespace {

constexpr int64_t kRejectionBudget = 1000000;
constexpr int64_t kParallelThreshold = 10000;

bool simplified(const std::vector<int>& word) {
  for (size_t i = 1; i < word.size(); ++i)
    if (word[i] == word[i - 1]) return false;
  return true;
}

std::vector<std::pair<int, int>> consecutive_pairs(const std::vector<int>& word) {
  std::vector<std::pair<int, int>> pairs;
  for (size_t i = 1; i < word.size(); ++i) pairs.emplace_back(word[i - 1], word[i]);
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<std::pair<int64_t, int64_t>> coinciding_positions(const std::vector<int>& a,
                                                              const std::vector<int>& b) {
  std::vector<std::pair<int64_t, int64_t>> out;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (a[i] == b[j]) out.emplace_back(static_cast<int64_t>(i), static_cast<int64_t>(j));
  return out;
}

std::vector<int> draw_word(Rng& rng, int64_t length, int mnip) {
  std::vector<int> word(static_cast<size_t>(length));
  for (auto& symbol : word) symbol = static_cast<int>(rng.raw() % static_cast<uint64_t>(mnip));
  return word;
}

void check_system(const BlockPairSystem& system) {
  require(system.mnip >= 2, ErrorCode::invalid_argument, "symbol pool needs at least 2 symbols");
  require(!system.block_a.empty() && !system.block_b.empty(), ErrorCode::invalid_argument,
          "blocks must be non-empty");
  for (const auto* block : {&system.block_a, &system.block_b})
    for (int symbol : *block)
      require(symbol >= 0 && symbol < system.mnip, ErrorCode::invalid_argument,
              "block symbol outside the pool");
}

}  // namespace

void ExperimentSpec::validate() const {
  require(len1 >= len2 && len2 >= 1, ErrorCode::invalid_argument,
          "block lengths must satisfy len1 >= len2 >= 1");
  require(mnip >= 2, ErrorCode::invalid_argument, "symbol pool needs at least 2 symbols");
  require(rank >= 1, ErrorCode::invalid_argument, "rank must be positive");
  require(dim >= 2 * rank, ErrorCode::invalid_argument, "dimension must be at least twice the rank");
  require(runs >= 1, ErrorCode::invalid_argument, "at least one run required");
  require(tol > 0, ErrorCode::invalid_argument, "tolerance must be positive");
  require(!control || dim >= 3, ErrorCode::invalid_argument, "control rows need dim >= 3");
}

bool blocks_homogeneous(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty() || b.empty()) return false;
  if (a.front() != b.front() || a.back() != b.back()) return false;
  return consecutive_pairs(a) == consecutive_pairs(b);
}

BlockPairSystem generate_block_pair(const ExperimentSpec& spec, uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  for (int64_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    std::vector<int> a = draw_word(rng, spec.len1, spec.mnip);
    std::vector<int> b = draw_word(rng, spec.len2, spec.mnip);
    if (!simplified(a) || !simplified(b)) continue;
    if (spec.len1 == spec.len2 && a == b) continue;
    if (spec.rank == 1 && blocks_homogeneous(a, b)) continue;
    BlockPairSystem system;
    system.mnip = spec.mnip;
    system.block_a = std::move(a);
    system.block_b = std::move(b);
    system.forced_equivalences = coinciding_positions(system.block_a, system.block_b);
    return system;
  }
  fail(ErrorCode::infeasible_spec, "no admissible block pair found within the rejection budget");
}

std::pair<Cplx, Cplx> evaluate_pair(const BlockPairSystem& system, int rank, int dim,
                                    uint64_t trial_seed) {
  check_system(system);
  require(rank >= 1, ErrorCode::invalid_argument, "rank must be positive");
  require(dim >= 2 * rank, ErrorCode::invalid_argument, "dimension must be at least twice the rank");

  std::vector<CMat> projector(static_cast<size_t>(system.mnip));
  for (const auto* block : {&system.block_a, &system.block_b})
    for (int symbol : *block)
      if (projector[static_cast<size_t>(symbol)].size() == 0)
        projector[static_cast<size_t>(symbol)] =
            sample_projective_measurement(
                dim, rank, 2, derive_seed(trial_seed, seed_role::symbol, static_cast<uint64_t>(symbol)))
                .projectors[0];

  DensityMatrix state = sample_density_matrix(dim, derive_seed(trial_seed, seed_role::state));
  auto block_trace = [&](const std::vector<int>& block) {
    CMat op = CMat::Identity(dim, dim);
    for (int symbol : block) op = op * projector[static_cast<size_t>(symbol)];
    return (state.entries * op).trace();
  };
  return {block_trace(system.block_a), block_trace(system.block_b)};
}

ExperimentReport run_trials(const BlockPairSystem& system, int rank, int dim, int64_t runs,
                            double tol, uint64_t seed) {
  check_system(system);
  require(runs >= 1, ErrorCode::invalid_argument, "at least one run required");
  require(tol > 0, ErrorCode::invalid_argument, "tolerance must be positive");
  auto started = std::chrono::steady_clock::now();

  auto trial_range = [&](int64_t begin, int64_t end, int64_t* equalities, double* smallest) {
    for (int64_t t = begin; t < end; ++t) {
      auto [e1, e2] = evaluate_pair(system, rank, dim,
                                    derive_seed(seed, seed_role::trial, static_cast<uint64_t>(t)));
      double diff = std::abs(e1 - e2);
      if (diff <= tol) ++*equalities;
      *smallest = std::min(*smallest, diff);
    }
  };

  int64_t workers = 1;
  if (runs >= kParallelThreshold)
    workers = std::clamp<int64_t>(std::thread::hardware_concurrency(), 1, 16);

  std::vector<int64_t> counts(static_cast<size_t>(workers), 0);
  std::vector<double> minima(static_cast<size_t>(workers), std::numeric_limits<double>::infinity());
  if (workers == 1) {
    trial_range(0, runs, &counts[0], &minima[0]);
  } else {
    std::vector<std::thread> pool;
    for (int64_t w = 0; w < workers; ++w)
      pool.emplace_back(trial_range, runs * w / workers, runs * (w + 1) / workers, &counts[w],
                        &minima[w]);
    for (auto& worker : pool) worker.join();
  }

  ExperimentReport report;
  report.runs_done = runs;
  for (int64_t c : counts) report.equalities_found += c;
  report.min_abs_difference = *std::min_element(minima.begin(), minima.end());
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ExperimentReport run_trials(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.control) return verify_homogeneous_equality(spec.runs, spec.dim, spec.seed);
  BlockPairSystem system = generate_block_pair(spec, spec.seed);
  return run_trials(system, spec.rank, spec.dim, spec.runs, spec.tol, spec.seed);
}

ExperimentReport verify_homogeneous_equality(int64_t trials, int dim, uint64_t seed) {
  require(trials >= 1, ErrorCode::invalid_argument, "at least one trial required");
  require(dim >= 3, ErrorCode::invalid_argument,
          "the homogeneous pair uses 3 independent projectors");
  BlockPairSystem system;
  system.mnip = 3;
  system.block_a = {0, 1, 0, 2, 0};
  system.block_b = {0, 2, 0, 1, 0};
  system.forced_equivalences = coinciding_positions(system.block_a, system.block_b);
  return run_trials(system, 1, dim, trials, 1e-9, seed);
}

std::vector<ExperimentSpec> parse_experiment_specs(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open experiment spec file: " + path);

  std::vector<ExperimentSpec> specs;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    ExperimentSpec spec;
    if (head == "control") {
      spec.control = true;
      spec.len1 = spec.len2 = 5;
      spec.mnip = 3;
      spec.rank = 1;
      spec.tol = 1e-9;
      require(static_cast<bool>(fields >> spec.dim >> spec.runs >> spec.seed),
              ErrorCode::invalid_argument,
              "line " + std::to_string(line_no) + ": expected 'control d runs seed'");
    } else {
      fields.clear();
      fields.str(line);
      require(static_cast<bool>(fields >> spec.len1 >> spec.len2 >> spec.mnip >> spec.rank >>
                                spec.dim >> spec.runs >> spec.tol >> spec.seed),
              ErrorCode::invalid_argument,
              "line " + std::to_string(line_no) + ": expected 'l1 l2 mnip r d runs tol seed'");
    }
    std::string extra;
    require(!(fields >> extra), ErrorCode::invalid_argument,
            "line " + std::to_string(line_no) + ": trailing fields");
    try {
      spec.validate();
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace npam
