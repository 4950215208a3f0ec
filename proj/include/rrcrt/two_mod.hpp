#pragma once

#include <cstdint>
#include <vector>

#include "rrcrt/modmath.hpp"

namespace rrcrt {

enum class ScalarMode { integer, real };

/// Two moduli m_i = m * gamma_i with coprime cofactors 1 < gamma1 < gamma2.
///
/// In integer mode m, m1, m2 are integers. In real mode only the cofactors
/// are integers and m is a positive real.
class TwoModSystem {
 public:
  static TwoModSystem from_moduli(std::int64_t m1, std::int64_t m2);
  static TwoModSystem real(double m, std::int64_t gamma1, std::int64_t gamma2);

  ScalarMode mode() const { return mode_; }
  bool is_integer() const { return mode_ == ScalarMode::integer; }

  std::int64_t gamma1() const { return gamma1_; }
  std::int64_t gamma2() const { return gamma2_; }

  // Integer mode only; throw ArgumentError in real mode.
  std::int64_t m() const;
  std::int64_t m1() const;
  std::int64_t m2() const;
  std::int64_t lcm() const;

  double real_m() const { return m_real_; }
  double real_m1() const { return m_real_ * static_cast<double>(gamma1_); }
  double real_m2() const { return m_real_ * static_cast<double>(gamma2_); }

 private:
  TwoModSystem(ScalarMode mode, std::int64_t m, double m_real, std::int64_t g1, std::int64_t g2)
      : mode_(mode), m_(m), m_real_(m_real), gamma1_(g1), gamma2_(g2) {}

  ScalarMode mode_;
  std::int64_t m_;
  double m_real_;
  std::int64_t gamma1_;
  std::int64_t gamma2_;
};

/// sigma_{-1} = gamma2, sigma_0 = gamma1, sigma_i = sigma_{i-2} mod sigma_{i-1},
/// stopped at the first 1. K is the last index with sigma_K > 1.
struct SigmaChain {
  std::vector<std::int64_t> sigma;  // sigma[i + 1] holds sigma_i
  int K = 0;

  std::int64_t at(int i) const { return sigma.at(static_cast<std::size_t>(i + 1)); }
  int level_count() const { return K + 1; }
};

SigmaChain sigma_chain(std::int64_t gamma1, std::int64_t gamma2);
SigmaChain sigma_chain(const TwoModSystem& system);

/// The min-form remainder chain used by the older two-moduli bounds.
/// delta[i + 1] holds delta_i; delta_G = m. Integer mode only.
struct DeltaChain {
  std::vector<std::int64_t> delta;
  int G = 0;

  std::int64_t at(int i) const { return delta.at(static_cast<std::size_t>(i + 1)); }
};

DeltaChain delta_chain(const TwoModSystem& system);

/// S_{side,n}: side 2 holds |t gamma2|_{gamma1}, side 1 holds |t gamma1|_{gamma2},
/// for t = 0..n. Elements are kept in t order.
struct ResidueLadder {
  int side = 2;
  std::int64_t depth = 0;
  std::vector<std::int64_t> elements;
  std::int64_t d_min = 0;
};

ResidueLadder residue_ladder(const TwoModSystem& system, int side, std::int64_t depth);

struct LadderDepths {
  std::int64_t n1 = 0;  // n-double-dot_{1,j}
  std::int64_t n2 = 0;  // n-double-dot_{2,j}

  friend bool operator==(const LadderDepths&, const LadderDepths&) = default;
};

/// Ladder depths of level j (1 <= j <= K+1) from the sigma-chain recurrences.
LadderDepths n_ddot_closed_form(const TwoModSystem& system, int j);
LadderDepths n_ddot_closed_form(std::int64_t gamma1, std::int64_t gamma2, int j);

/// One row of the dynamic range / robustness trade-off.
struct RobustnessLevel {
  int j = 0;
  std::int64_t sigma_j = 0;
  std::int64_t n_ddot_1 = 0;
  std::int64_t n_ddot_2 = 0;
  std::int64_t dynamic_range = 0;  // integer mode; 0 in real mode
  double real_dynamic_range = 0.0;
  double robustness_bound = 0.0;  // m * sigma_j / 4
};

RobustnessLevel robustness_level(const TwoModSystem& system, int j);
std::vector<RobustnessLevel> level_table(const TwoModSystem& system);

/// Older delta-chain bounds for comparison: i = 1 is the exact single-step
/// range, i >= 2 gives lower/upper range bounds at tau < delta_i / 4.
/// exact_range is the largest sigma-level range whose bound covers delta_i / 4.
struct DeltaBaseline {
  int i = 0;
  std::int64_t delta_i = 0;
  double bound = 0.0;
  std::int64_t range_lower = 0;
  std::int64_t range_upper = 0;
  std::int64_t exact_range = 0;
};

std::vector<DeltaBaseline> delta_baseline(const TwoModSystem& system);

template <class T>
struct RemainderObservation {
  T r1_tilde{};
  T r2_tilde{};
};

using IntObservation = RemainderObservation<std::int64_t>;
using RealObservation = RemainderObservation<double>;

bool in_range(const TwoModSystem& system, const IntObservation& obs);
bool in_range(const TwoModSystem& system, const RealObservation& obs);

struct FoldingSolution {
  std::int64_t n1_hat = 0;
  std::int64_t n2_hat = 0;
  std::int64_t N_hat = 0;
  double mean = 0.0;  // before rounding
};

struct RealFoldingSolution {
  std::int64_t n1_hat = 0;
  std::int64_t n2_hat = 0;
  double N_hat = 0.0;  // unrounded mean
};

/// Everything Algorithm 2 needs for one (system, level): sorted ladders with
/// the depth t of each element, the cofactor inverses, range and bound.
/// Immutable; share it across threads.
class LevelContext {
 public:
  LevelContext(const TwoModSystem& system, int j);

  const TwoModSystem& system() const { return system_; }
  const RobustnessLevel& level() const { return level_; }
  int j() const { return level_.j; }
  std::int64_t sigma_j() const { return level_.sigma_j; }

  struct Rung {
    std::int64_t value;
    std::int64_t t;
  };
  const std::vector<Rung>& ladder2() const { return ladder2_; }
  const std::vector<Rung>& ladder1() const { return ladder1_; }
  std::int64_t inv21() const { return inv21_; }  // gamma2^{-1} mod gamma1
  std::int64_t inv12() const { return inv12_; }  // gamma1^{-1} mod gamma2

 private:
  TwoModSystem system_;
  RobustnessLevel level_;
  std::vector<Rung> ladder2_;
  std::vector<Rung> ladder1_;
  std::int64_t inv21_;
  std::int64_t inv12_;
};

FoldingSolution algorithm1(const TwoModSystem& system, const IntObservation& obs);
RealFoldingSolution algorithm1_real(const TwoModSystem& system, const RealObservation& obs);

FoldingSolution algorithm2(const LevelContext& ctx, const IntObservation& obs);
FoldingSolution algorithm2(const TwoModSystem& system, const IntObservation& obs, int j);
RealFoldingSolution algorithm2_real(const LevelContext& ctx, const RealObservation& obs);
RealFoldingSolution algorithm2_real(const TwoModSystem& system, const RealObservation& obs, int j);

/// [(n1 m1 + r1~ + n2 m2 + r2~) / 2]
std::int64_t estimate_N(std::int64_t n1, std::int64_t n2, const IntObservation& obs,
                        const TwoModSystem& system);
double estimate_N_real(std::int64_t n1, std::int64_t n2, const RealObservation& obs,
                       const TwoModSystem& system);

}  // namespace rrcrt
