#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rrcrt/two_mod.hpp"

// Brute-force references. Nothing here calls into the closed forms it is
// meant to check, so agreement is evidence and not a tautology.

namespace rrcrt {

struct OracleReport {
  std::string instance;
  std::string expected;
  std::string computed;
  bool agree = false;
};

OracleReport make_report(std::string instance, std::string expected, std::string computed);

/// Scans N in [0, search_bound) and keeps the N whose exact remainders
/// minimize max_i |r~_i - r_i|, ties to the smallest N. Returns its
/// foldings with N_hat = N.
FoldingSolution exhaustive_folding_search(const TwoModSystem& system, const IntObservation& obs,
                                          std::int64_t search_bound);
FoldingSolution exhaustive_folding_search(const TwoModSystem& system, const RealObservation& obs,
                                          std::int64_t search_bound);

/// max{n : d_min(S_{side,n}) >= sigma_j} by growing the ladder one rung at a time.
LadderDepths n_ddot_definitional(const TwoModSystem& system, int j);

/// An adversarial instance at N = dynamic range. Errors can be half-integers,
/// so the observation is real-valued. j = 0 marks the Algorithm 1 instance.
struct Falsifier {
  int j = 0;
  std::int64_t N = 0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;
  double dr1 = 0.0;
  double dr2 = 0.0;
  RealObservation obs;
  bool legal = false;  // (dr1 - dr2)/m in [-sigma_j/2, sigma_j/2) and r~ in range
};

Falsifier dynamic_range_falsifier(const TwoModSystem& system, int j);
Falsifier algorithm1_falsifier(const TwoModSystem& system);

/// Linear scan of [0, lcm) for the N matching every remainder. nullopt when
/// the remainders are inconsistent or out of range.
std::optional<std::int64_t> crt_scan(std::span<const std::int64_t> remainders, std::span<const std::int64_t> moduli);

/// N in [0, search_bound) minimizing max_i |r~_i - N mod m_i|, ties to the smallest.
std::int64_t nearest_scan(std::span<const double> remainders, std::span<const std::int64_t> moduli,
                          std::int64_t search_bound);

// Verification suites shared by the CLI and the tests.

struct SuiteResult {
  std::string name;
  std::int64_t checked = 0;
  std::int64_t failures = 0;
  std::string detail;  // first failure, or a summary

  bool passed() const { return failures == 0 && checked > 0; }
};

/// Every level, every N below its range, every integer error pair keeping
/// r~ in range with (dr1 - dr2)/m in [-sigma_j/2, sigma_j/2): Algorithm 2
/// must return the true foldings and |N_hat - N| <= max |dr|.
SuiteResult verify_exhaustive(const TwoModSystem& system);

/// Closed-form ladder depths against the definitional scan, all levels.
SuiteResult verify_n_ddot(const TwoModSystem& system);

/// Each level's falsifier must be legal and must break n2. A failure of
/// the falsifier to falsify counts as a suite failure.
SuiteResult verify_falsifiers(const TwoModSystem& system);

/// verify_n_ddot over `count` random coprime pairs 1 < g1 < g2 <= gamma_max.
SuiteResult verify_random_n_ddot(int count, std::int64_t gamma_max, std::uint64_t seed);

}  // namespace rrcrt
