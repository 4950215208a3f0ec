#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrcrt/crt_core.hpp"
#include "rrcrt/two_mod.hpp"

namespace rrcrt {

/// Moduli m_k = g * Gamma_k with pairwise coprime cofactors; eta = lcm.
class ModuliGroup {
 public:
  explicit ModuliGroup(std::vector<std::int64_t> moduli);

  const std::vector<std::int64_t>& moduli() const { return moduli_; }
  const std::vector<std::int64_t>& cofactors() const { return cofactors_; }
  std::int64_t group_gcd() const { return gcd_; }
  std::int64_t eta() const { return eta_; }
  std::size_t size() const { return moduli_.size(); }

  // CRT over cofactors 2..L and Gamma_1^{-1} mod each of them
  const CrtSystem& tail_system() const { return tail_; }
  const std::vector<std::int64_t>& gamma1_inverses() const { return inv_; }

 private:
  std::vector<std::int64_t> moduli_;
  std::vector<std::int64_t> cofactors_;
  std::int64_t gcd_ = 0;
  std::int64_t eta_ = 0;
  CrtSystem tail_;
  std::vector<std::int64_t> inv_;
};

struct GroupSolution {
  std::vector<std::int64_t> h;  // folding integer per modulus
  std::int64_t estimate = 0;    // rounded mean of h_k m_k + r~_k
  double mean = 0.0;
};

struct RealGroupSolution {
  std::vector<std::int64_t> h;
  double estimate = 0.0;  // unrounded mean
};

/// Single-stage robust CRT. Exact when every pairwise error difference stays
/// below g/2, which tau < g/4 guarantees.
GroupSolution single_stage_robust_crt(const ModuliGroup& group, std::span<const std::int64_t> remainders);
RealGroupSolution single_stage_robust_crt(const ModuliGroup& group, std::span<const double> remainders);

/// Same idea for arbitrary moduli whose cofactors need not be coprime: the
/// rounded differences are resolved by general CRT. Valid for N below the
/// lcm of all moduli with tau < gcd / 4.
GroupSolution single_stage_general(const CrtSystem& system, std::span<const std::int64_t> remainders);
RealGroupSolution single_stage_general(const CrtSystem& system, std::span<const double> remainders);

double single_stage_tau_bound(std::span<const std::int64_t> moduli);

/// Two groups whose lcms form a two-modulus system solved at level j.
/// Groups are ordered so that eta_1 < eta_2; swapped() records whether the
/// caller's order was reversed. Remainders and foldings passed to and from
/// cascade_reconstruct always follow the caller's order.
class CascadeSpec {
 public:
  CascadeSpec(ModuliGroup first, ModuliGroup second, int j);

  const ModuliGroup& group1() const { return g1_; }
  const ModuliGroup& group2() const { return g2_; }
  const TwoModSystem& cross_system() const { return cross_; }
  const LevelContext& context() const { return ctx_; }
  int j() const { return ctx_.j(); }
  bool swapped() const { return swapped_; }
  bool overlapping() const { return overlapping_; }
  std::size_t total_moduli() const { return g1_.size() + g2_.size(); }
  // all moduli in the caller's order
  std::vector<std::int64_t> caller_moduli() const;

 private:
  ModuliGroup g1_;
  ModuliGroup g2_;
  bool swapped_;
  bool overlapping_;
  TwoModSystem cross_;
  LevelContext ctx_;
};

struct CascadeSolution {
  std::vector<std::int64_t> h;               // inner foldings, caller order
  std::int64_t l1 = 0;                       // outer foldings for eta_1 < eta_2
  std::int64_t l2 = 0;
  std::vector<std::int64_t> total_foldings;  // caller order
  double group_estimate1 = 0.0;
  double group_estimate2 = 0.0;
  std::int64_t N_hat = 0;
  double mean = 0.0;
};

CascadeSolution cascade_reconstruct(const CascadeSpec& spec, std::span<const std::int64_t> remainders);
/// Real remainders; N_hat holds the rounded mean, mean the raw value.
CascadeSolution cascade_reconstruct(const CascadeSpec& spec, std::span<const double> remainders);

struct CascadeBounds {
  std::int64_t dynamic_range = 0;
  double tau_bound = 0.0;
};

CascadeBounds cascade_bounds(const CascadeSpec& spec);

}  // namespace rrcrt
