#include "rrcrt/two_mod.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/rational.hpp>

namespace rrcrt {

TwoModSystem TwoModSystem::from_moduli(std::int64_t m1, std::int64_t m2) {
  if (m1 < 1 || m2 <= m1) {
    throw ArgumentError("two moduli must satisfy 1 <= m1 < m2, got (" + std::to_string(m1) + ", " +
                        std::to_string(m2) + ")");
  }
  const std::int64_t m = std::gcd(m1, m2);
  if (m == m1) {
    throw ArgumentError("m1 = " + std::to_string(m1) + " divides m2 = " + std::to_string(m2) +
                        "; need gamma1 > 1");
  }
  return TwoModSystem(ScalarMode::integer, m, static_cast<double>(m), m1 / m, m2 / m);
}

TwoModSystem TwoModSystem::real(double m, std::int64_t gamma1, std::int64_t gamma2) {
  if (!std::isfinite(m) || m <= 0.0) throw ArgumentError("real gcd m must be a positive finite number");
  if (gamma1 < 2 || gamma2 <= gamma1) throw ArgumentError("cofactors must satisfy 1 < gamma1 < gamma2");
  if (std::gcd(gamma1, gamma2) != 1) throw ArgumentError("cofactors must be coprime");
  return TwoModSystem(ScalarMode::real, 0, m, gamma1, gamma2);
}

std::int64_t TwoModSystem::m() const {
  if (!is_integer()) throw ArgumentError("integer m requested from a real-mode system");
  return m_;
}
std::int64_t TwoModSystem::m1() const { return checked_mul(m(), gamma1_); }
std::int64_t TwoModSystem::m2() const { return checked_mul(m(), gamma2_); }
std::int64_t TwoModSystem::lcm() const { return checked_mul(m(), checked_mul(gamma1_, gamma2_)); }

SigmaChain sigma_chain(std::int64_t gamma1, std::int64_t gamma2) {
  if (gamma1 < 2 || gamma2 <= gamma1 || std::gcd(gamma1, gamma2) != 1) {
    throw ArgumentError("sigma chain needs coprime 1 < gamma1 < gamma2");
  }
  SigmaChain out;
  out.sigma = {gamma2, gamma1};
  while (out.sigma.back() > 1) {
    const auto n = out.sigma.size();
    out.sigma.push_back(out.sigma[n - 2] % out.sigma[n - 1]);
  }
  // last entry is sigma_{K+1} = 1 at position K + 2
  out.K = static_cast<int>(out.sigma.size()) - 3;
  return out;
}

SigmaChain sigma_chain(const TwoModSystem& system) { return sigma_chain(system.gamma1(), system.gamma2()); }

DeltaChain delta_chain(const TwoModSystem& system) {
  const std::int64_t m = system.m();
  DeltaChain out;
  out.delta = {system.m2(), system.m1(), system.m2() % system.m1()};
  while (out.delta.back() != m) {
    const auto n = out.delta.size();
    const std::int64_t r = out.delta[n - 2] % out.delta[n - 1];
    out.delta.push_back(std::min(r, out.delta[n - 1] - r));
  }
  out.G = static_cast<int>(out.delta.size()) - 2;
  return out;
}

ResidueLadder residue_ladder(const TwoModSystem& system, int side, std::int64_t depth) {
  if (side != 1 && side != 2) throw ArgumentError("ladder side must be 1 or 2");
  const std::int64_t step = side == 2 ? system.gamma2() : system.gamma1();
  const std::int64_t mod = side == 2 ? system.gamma1() : system.gamma2();
  if (depth < 1 || depth >= mod) {
    throw ArgumentError("ladder depth " + std::to_string(depth) + " outside [1, " + std::to_string(mod) + ")");
  }
  ResidueLadder out;
  out.side = side;
  out.depth = depth;
  out.elements.reserve(static_cast<std::size_t>(depth + 1));
  const std::int64_t inc = step % mod;
  std::int64_t v = 0;
  for (std::int64_t t = 0; t <= depth; ++t) {
    out.elements.push_back(v);
    v += inc;
    if (v >= mod) v -= mod;
  }
  auto sorted = out.elements;
  std::sort(sorted.begin(), sorted.end());
  out.d_min = mod;
  for (std::size_t i = 1; i < sorted.size(); ++i) out.d_min = std::min(out.d_min, sorted[i] - sorted[i - 1]);
  return out;
}

LadderDepths n_ddot_closed_form(std::int64_t gamma1, std::int64_t gamma2, int j) {
  const SigmaChain chain = sigma_chain(gamma1, gamma2);
  const int K = chain.K;
  if (j < 1 || j > K + 1) {
    throw ArgumentError("level j = " + std::to_string(j) + " outside [1, " + std::to_string(K + 1) + "]");
  }
  if (j == K + 1) return {gamma2 - 1, gamma1 - 1};

  // a(i) = floor(sigma_{i-1} / sigma_i)
  auto a = [&](int i) { return chain.at(i - 1) / chain.at(i); };
  std::vector<LadderDepths> d(static_cast<std::size_t>(j + 1));
  d[1] = {checked_mul(a(0), a(1)), a(1)};
  if (j >= 2) {
    d[2].n2 = checked_mul(a(1), a(2));
    d[2].n1 = checked_add(checked_add(checked_mul(checked_mul(a(0), a(1)), a(2)), a(2)), a(0));
  }
  for (int i = 3; i <= j; ++i) {
    const std::int64_t f = a(i);
    const auto& p1 = d[static_cast<std::size_t>(i - 1)];
    const auto& p2 = d[static_cast<std::size_t>(i - 2)];
    auto& cur = d[static_cast<std::size_t>(i)];
    if (i % 2 == 1) {
      cur.n2 = checked_add(checked_mul(f, p1.n2 + 1), p2.n2);
      cur.n1 = checked_add(checked_mul(f, p1.n1), p2.n1);
    } else {
      cur.n2 = checked_add(checked_mul(f, p1.n2), p2.n2);
      cur.n1 = checked_add(checked_mul(f, p1.n1 + 1), p2.n1);
    }
  }
  return d[static_cast<std::size_t>(j)];
}

LadderDepths n_ddot_closed_form(const TwoModSystem& system, int j) {
  return n_ddot_closed_form(system.gamma1(), system.gamma2(), j);
}

RobustnessLevel robustness_level(const TwoModSystem& system, int j) {
  const auto depths = n_ddot_closed_form(system, j);
  RobustnessLevel row;
  row.j = j;
  row.sigma_j = sigma_chain(system).at(j);
  row.n_ddot_1 = depths.n1;
  row.n_ddot_2 = depths.n2;
  if (system.is_integer()) {
    row.dynamic_range = std::min(checked_mul(system.m2(), depths.n2 + 1), checked_mul(system.m1(), depths.n1 + 1));
    row.real_dynamic_range = static_cast<double>(row.dynamic_range);
  } else {
    row.real_dynamic_range = std::min(system.real_m2() * static_cast<double>(depths.n2 + 1),
                                      system.real_m1() * static_cast<double>(depths.n1 + 1));
  }
  row.robustness_bound = system.real_m() * static_cast<double>(row.sigma_j) / 4.0;
  return row;
}

std::vector<RobustnessLevel> level_table(const TwoModSystem& system) {
  const int levels = sigma_chain(system).level_count();
  std::vector<RobustnessLevel> out;
  out.reserve(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) out.push_back(robustness_level(system, j));
  return out;
}

std::vector<DeltaBaseline> delta_baseline(const TwoModSystem& system) {
  const DeltaChain chain = delta_chain(system);
  const auto table = level_table(system);
  const std::int64_t m1 = system.m1();
  const std::int64_t m2 = system.m2();
  const std::int64_t base = checked_mul(m1, 1 + checked_mul(m2 / m1, m1 / chain.at(1)));

  std::vector<DeltaBaseline> out;
  std::int64_t lower = base;
  for (int i = 1; i <= chain.G; ++i) {
    DeltaBaseline row;
    row.i = i;
    row.delta_i = chain.at(i);
    row.bound = static_cast<double>(row.delta_i) / 4.0;
    if (i == 1) {
      row.range_lower = row.range_upper = base;
    } else {
      lower = checked_mul(lower, chain.at(i - 1) / chain.at(i));
      row.range_lower = lower;
      row.range_upper = std::max(checked_mul(m1, m2 / row.delta_i), checked_mul(m2, m1 / row.delta_i));
    }
    for (const auto& level : table) {
      if (checked_mul(system.m(), level.sigma_j) >= row.delta_i) row.exact_range = level.dynamic_range;
    }
    out.push_back(row);
  }
  return out;
}

bool in_range(const TwoModSystem& system, const IntObservation& obs) {
  return obs.r1_tilde >= 0 && obs.r1_tilde < system.m1() && obs.r2_tilde >= 0 && obs.r2_tilde < system.m2();
}

bool in_range(const TwoModSystem& system, const RealObservation& obs) {
  return obs.r1_tilde >= 0.0 && obs.r1_tilde < system.real_m1() && obs.r2_tilde >= 0.0 &&
         obs.r2_tilde < system.real_m2();
}

LevelContext::LevelContext(const TwoModSystem& system, int j)
    : system_(system),
      level_(robustness_level(system, j)),
      inv21_(mod_inverse(system.gamma2(), system.gamma1())),
      inv12_(mod_inverse(system.gamma1(), system.gamma2())) {
  auto build = [](std::int64_t step, std::int64_t mod, std::int64_t depth) {
    std::vector<Rung> rungs;
    rungs.reserve(static_cast<std::size_t>(depth + 1));
    std::int64_t v = 0;
    const std::int64_t inc = step % mod;
    for (std::int64_t t = 0; t <= depth; ++t) {
      rungs.push_back({v, t});
      v += inc;
      if (v >= mod) v -= mod;
    }
    std::sort(rungs.begin(), rungs.end(), [](const Rung& a, const Rung& b) { return a.value < b.value; });
    return rungs;
  };
  ladder2_ = build(system.gamma2(), system.gamma1(), level_.n_ddot_2);
  ladder1_ = build(system.gamma1(), system.gamma2(), level_.n_ddot_1);
}

namespace {

using Rational = boost::rational<std::int64_t>;

std::int64_t floor_of(const Rational& x) { return floor_div(x.numerator(), x.denominator()); }
std::int64_t floor_of(double x) {
  const double f = std::floor(x);
  if (!std::isfinite(f) || f < -9.2e18 || f > 9.2e18) throw OverflowError("floor exceeds int64");
  return static_cast<std::int64_t>(f);
}

// [x] = floor(x + 1/2)
std::int64_t round_of(const Rational& x) {
  return floor_div(checked_add(checked_mul(2, x.numerator()), x.denominator()), checked_mul(2, x.denominator()));
}
std::int64_t round_of(double x) { return round_half_up(x); }

template <class S>
S abs_of(const S& x) {
  return x < S(0) ? -x : x;
}

template <class S>
struct Inputs {
  S r1, r2, m, m1, m2;
};

// Window lookup in a sorted ladder. lo_open selects (lo, hi] versus [lo, hi).
// Falls back to the element nearest center, ties to the smaller element.
template <class S>
const LevelContext::Rung& pick(const std::vector<LevelContext::Rung>& ladder, const S& center, const S& half,
                               bool lo_open) {
  using Rung = LevelContext::Rung;
  const S lo = center - half;
  const S hi = center + half;
  auto it = lo_open ? std::upper_bound(ladder.begin(), ladder.end(), lo,
                                       [](const S& v, const Rung& r) { return v < S(r.value); })
                    : std::lower_bound(ladder.begin(), ladder.end(), lo,
                                       [](const Rung& r, const S& v) { return S(r.value) < v; });
  if (it != ladder.end()) {
    const S x(it->value);
    if (lo_open ? x <= hi : x < hi) return *it;
  }
  if (it == ladder.end()) return ladder.back();
  if (it == ladder.begin()) return *it;
  const auto prev = std::prev(it);
  return abs_of(center - S(prev->value)) <= abs_of(center - S(it->value)) ? *prev : *it;
}

template <class S>
std::pair<std::int64_t, std::int64_t> fold2(const LevelContext& ctx, const Inputs<S>& in) {
  const S q = (in.r1 - in.r2) / in.m;
  const S half = S(ctx.sigma_j()) / S(2);
  if (q >= half) {
    // -sigma/2 <= q - x < sigma/2  <=>  x in (q - sigma/2, q + sigma/2]
    const auto& rung = pick(ctx.ladder2(), q, half, true);
    // rung.t equals s2 * inv21 mod gamma1 since t < gamma1
    const std::int64_t n2 = rung.t;
    const std::int64_t n1 = round_of((S(n2) * in.m2 + in.r2 - in.r1) / in.m1);
    return {n1, n2};
  }
  if (q < -half) {
    // -sigma/2 <= q + y < sigma/2  <=>  y in [-q - sigma/2, -q + sigma/2)
    const auto& rung = pick(ctx.ladder1(), -q, half, false);
    const std::int64_t n1 = rung.t;
    const std::int64_t n2 = round_of((S(n1) * in.m1 + in.r1 - in.r2) / in.m2);
    return {n1, n2};
  }
  return {0, 0};
}

template <class S>
std::pair<std::int64_t, std::int64_t> fold1(const TwoModSystem& system, const Inputs<S>& in) {
  const std::int64_t g1 = system.gamma1();
  const std::int64_t s1 = system.gamma2() % g1;
  const S q = (in.r1 - in.r2) / in.m;
  const S half = S(s1) / S(2);
  std::int64_t n2 = 0;
  if (q >= half) {
    n2 = round_of(q / S(s1));
  } else if (q < -half) {
    const S w = q - S(floor_of(q / S(g1))) * S(g1);
    if (w >= half && w < S((g1 / s1) * s1) - half) n2 = round_of(w / S(s1));
  }
  const std::int64_t n1 = round_of((S(n2) * in.m2 + in.r2 - in.r1) / in.m1);
  return {n1, n2};
}

Inputs<Rational> rational_inputs(const TwoModSystem& system, const IntObservation& obs) {
  return {Rational(obs.r1_tilde), Rational(obs.r2_tilde), Rational(system.m()), Rational(system.m1()),
          Rational(system.m2())};
}

Inputs<double> real_inputs(const TwoModSystem& system, const RealObservation& obs) {
  return {obs.r1_tilde, obs.r2_tilde, system.real_m(), system.real_m1(), system.real_m2()};
}

FoldingSolution finish(std::pair<std::int64_t, std::int64_t> n, const IntObservation& obs,
                       const TwoModSystem& system) {
  FoldingSolution out;
  out.n1_hat = n.first;
  out.n2_hat = n.second;
  const std::int64_t sum = checked_add(checked_add(checked_mul(n.first, system.m1()), obs.r1_tilde),
                                       checked_add(checked_mul(n.second, system.m2()), obs.r2_tilde));
  out.N_hat = floor_div(checked_add(sum, 1), 2);
  out.mean = static_cast<double>(sum) / 2.0;
  return out;
}

RealFoldingSolution finish_real(std::pair<std::int64_t, std::int64_t> n, const RealObservation& obs,
                                const TwoModSystem& system) {
  return {n.first, n.second, estimate_N_real(n.first, n.second, obs, system)};
}

}  // namespace

FoldingSolution algorithm1(const TwoModSystem& system, const IntObservation& obs) {
  return finish(fold1(system, rational_inputs(system, obs)), obs, system);
}

RealFoldingSolution algorithm1_real(const TwoModSystem& system, const RealObservation& obs) {
  return finish_real(fold1(system, real_inputs(system, obs)), obs, system);
}

FoldingSolution algorithm2(const LevelContext& ctx, const IntObservation& obs) {
  const auto& system = ctx.system();
  return finish(fold2(ctx, rational_inputs(system, obs)), obs, system);
}

FoldingSolution algorithm2(const TwoModSystem& system, const IntObservation& obs, int j) {
  return algorithm2(LevelContext(system, j), obs);
}

RealFoldingSolution algorithm2_real(const LevelContext& ctx, const RealObservation& obs) {
  const auto& system = ctx.system();
  return finish_real(fold2(ctx, real_inputs(system, obs)), obs, system);
}

RealFoldingSolution algorithm2_real(const TwoModSystem& system, const RealObservation& obs, int j) {
  return algorithm2_real(LevelContext(system, j), obs);
}

std::int64_t estimate_N(std::int64_t n1, std::int64_t n2, const IntObservation& obs, const TwoModSystem& system) {
  return finish({n1, n2}, obs, system).N_hat;
}

double estimate_N_real(std::int64_t n1, std::int64_t n2, const RealObservation& obs, const TwoModSystem& system) {
  return (static_cast<double>(n1) * system.real_m1() + obs.r1_tilde + static_cast<double>(n2) * system.real_m2() +
          obs.r2_tilde) /
         2.0;
}

}  // namespace rrcrt
