#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace npam {

enum class ErrorCode {
  invalid_argument,
  io,
  solver_failure,
  infeasible_spec,
  internal,
};

// Library-wide exception type; the C API maps `code` onto its status enum and
// the CLI maps it onto process exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

// SplitMix64 mixing step (Steele, Lea, Flood 2014), used both as a generic
// 64-bit mixer and as the documented sub-seed derivation hash.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derive an independent sub-seed from a master seed and up to three tags
// (role, party/index, setting/trial). Chained SplitMix64 over the tuple;
// distinct tuples give distinct streams for all practical purposes, and the
// derivation is pure, so parallel callers can re-derive seeds independently.
inline uint64_t derive_seed(uint64_t master, uint64_t tag0, uint64_t tag1 = 0, uint64_t tag2 = 0) {
  uint64_t s = splitmix64(master);
  s = splitmix64(s ^ tag0);
  s = splitmix64(s ^ tag1);
  s = splitmix64(s ^ tag2);
  return s;
}

// Role tags for derive_seed. Values are arbitrary but frozen: changing them
// changes every sampled realization for a given master seed.
namespace seed_role {
constexpr uint64_t state = 0x5354415445ull;        // realization state
constexpr uint64_t measurement = 0x4d454153ull;    // per (party, setting) projector set
constexpr uint64_t sample = 0x53414d504cull;       // per-sample realization in multi-sample runs
constexpr uint64_t trial = 0x545249414cull;        // per-trial seed in Monte-Carlo experiments
constexpr uint64_t symbol = 0x53594d42ull;         // per abstract symbol in block-pair trials
}  // namespace seed_role

// Deterministic Gaussian source: std::mt19937_64 for uniforms plus an explicit
// Box-Muller transform. std::normal_distribution is not pinned down by the
// standard, so the transform is written out here to keep outputs identical
// across standard-library implementations within one build.
class Rng {
public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform double in (0, 1]: top 53 bits of the engine output, shifted into
  // the unit interval, plus one ulp so log() never sees zero.
  double uniform_pos() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform_pos();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace npam
