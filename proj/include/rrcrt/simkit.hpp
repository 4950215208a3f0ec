#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rrcrt {

/// Counter-based generator: the stream for (seed, point, trial) does not
/// depend on which thread runs it or in what order.
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial);

  std::uint64_t next();
  double uniform01();                          // [0, 1)
  double uniform(double lo, double hi);        // [lo, hi)
  std::int64_t below(std::int64_t n);          // [0, n)
  std::int64_t between(std::int64_t lo, std::int64_t hi);  // [lo, hi]

 private:
  std::uint64_t state_;
};

enum class RangePolicy { unclamped, clamp };
enum class ErrorModel { uniform_real, uniform_integer };
enum class AlgorithmChoice { automatic, alg1, alg2 };

std::string to_string(RangePolicy p);
std::string to_string(ErrorModel e);
std::string to_string(AlgorithmChoice a);
RangePolicy parse_range_policy(const std::string& s);
ErrorModel parse_error_model(const std::string& s);
AlgorithmChoice parse_algorithm(const std::string& s);

struct TrialConfig {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
  int level = 1;
  std::vector<double> taus;
  std::int64_t trials_per_point = 100000;
  std::uint64_t seed = 0;
  ErrorModel error_model = ErrorModel::uniform_real;
  RangePolicy range_policy = RangePolicy::unclamped;
  AlgorithmChoice algorithm = AlgorithmChoice::automatic;
  unsigned threads = 0;  // 0 picks the hardware count
};

struct SweepRow {
  double x = 0.0;
  double mean_abs_error = 0.0;
  double mean_rel_error = 0.0;
  double failure_rate = 0.0;
  double clamped_fraction = 0.0;  // trials with some r~ outside [0, m_i), whatever the policy
  std::int64_t trials = 0;
  std::int64_t rel_excluded = 0;  // trials with N = 0
};

struct SweepResult {
  std::string series;
  std::vector<SweepRow> rows;
};

/// Per tau: N uniform in [0, dynamic range), errors uniform on [-tau, tau].
SweepResult run_tau_sweep(const TrialConfig& config);

/// Per N in neighbors: errors uniform within the level's robustness bound.
/// config.taus is ignored.
SweepResult run_boundary_probe(const TrialConfig& config, std::span<const std::int64_t> neighbors);

struct ComparisonConfig {
  std::vector<std::int64_t> group1;
  std::vector<std::int64_t> group2;
  int level = 1;
  std::vector<double> taus;
  std::int64_t trials_per_point = 100000;
  std::uint64_t seed = 0;
  ErrorModel error_model = ErrorModel::uniform_real;
  RangePolicy range_policy = RangePolicy::unclamped;
  unsigned threads = 0;
};

/// Three series on identical draws, N uniform below the level-j cascade range:
/// "single_stage" over all moduli, "two_stage" (cascade at the top level) and
/// "cascade_j<level>".
std::vector<SweepResult> run_comparison(const ComparisonConfig& config);

}  // namespace rrcrt
