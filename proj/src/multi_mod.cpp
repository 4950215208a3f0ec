#include "rrcrt/multi_mod.hpp"

#include <algorithm>
#include <numeric>

namespace rrcrt {

namespace {

std::vector<std::int64_t> validated(std::vector<std::int64_t> moduli) {
  if (moduli.size() < 2) throw ArgumentError("a moduli group needs at least two moduli");
  for (const auto m : moduli) {
    if (m < 1) throw ArgumentError("moduli must be positive, got " + std::to_string(m));
  }
  return moduli;
}

std::int64_t gcd_of(std::span<const std::int64_t> v) {
  std::int64_t g = 0;
  for (const auto x : v) g = std::gcd(g, x);
  return g;
}

std::vector<std::int64_t> cofactors_of(const std::vector<std::int64_t>& moduli) {
  const std::int64_t g = gcd_of(moduli);
  std::vector<std::int64_t> out;
  for (const auto m : moduli) out.push_back(m / g);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = i + 1; k < out.size(); ++k) {
      if (std::gcd(out[i], out[k]) != 1) {
        throw ArgumentError("cofactors " + std::to_string(out[i]) + " and " + std::to_string(out[k]) +
                            " are not coprime; single-stage robust CRT needs pairwise coprime cofactors");
      }
    }
  }
  return out;
}

std::int64_t product_times(std::int64_t g, const std::vector<std::int64_t>& c) {
  std::int64_t p = g;
  for (const auto x : c) p = checked_mul(p, x);
  return p;
}

// [(a - b) / g]
std::int64_t rounded_diff(std::int64_t a, std::int64_t b, std::int64_t g) {
  return floor_div(checked_add(checked_mul(2, checked_add(a, -b)), g), checked_mul(2, g));
}
std::int64_t rounded_diff(double a, double b, std::int64_t g) { return round_half_up((a - b) / static_cast<double>(g)); }

// [sum / L] for integers, exact
std::int64_t rounded_mean(std::int64_t sum, std::int64_t L) {
  return floor_div(checked_add(checked_mul(2, sum), L), checked_mul(2, L));
}

template <class T>
std::vector<std::int64_t> group_foldings(const ModuliGroup& group, std::span<const T> r) {
  if (r.size() != group.size()) {
    throw ArgumentError("expected " + std::to_string(group.size()) + " remainders, got " + std::to_string(r.size()));
  }
  const auto& c = group.cofactors();
  const std::size_t L = group.size();
  std::vector<std::int64_t> xi(L, 0);
  std::vector<std::int64_t> tail(L - 1);
  for (std::size_t k = 1; k < L; ++k) {
    xi[k] = rounded_diff(r[k], r[0], group.group_gcd());
    // h_1 Gamma_1 = xi_k (mod Gamma_k)
    tail[k - 1] = floor_mod(checked_mul(floor_mod(xi[k], c[k]), group.gamma1_inverses()[k - 1]), c[k]);
  }
  const std::int64_t h1 = to_int64(crt_formula(tail, group.tail_system()));
  std::vector<std::int64_t> h(L);
  h[0] = h1;
  for (std::size_t k = 1; k < L; ++k) h[k] = (checked_mul(h1, c[0]) - xi[k]) / c[k];
  return h;
}

template <class T>
std::vector<std::int64_t> general_foldings(const CrtSystem& system, std::span<const T> r) {
  const auto& m = system.moduli();
  if (r.size() != m.size()) {
    throw ArgumentError("expected " + std::to_string(m.size()) + " remainders, got " + std::to_string(r.size()));
  }
  const std::int64_t g = gcd_of(m);
  // N - r~_1 is near 0 mod m_1 and near g * xi_k mod m_k
  std::vector<std::int64_t> shifted(m.size(), 0);
  for (std::size_t k = 1; k < m.size(); ++k) {
    shifted[k] = floor_mod(checked_mul(g, rounded_diff(r[k], r[0], g)), m[k]);
  }
  const std::int64_t x = to_int64(crt_formula(shifted, system));
  std::vector<std::int64_t> n(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if constexpr (std::is_same_v<T, double>) {
      n[i] = round_half_up((static_cast<double>(x) + r[0] - r[i]) / static_cast<double>(m[i]));
    } else {
      n[i] = rounded_diff(checked_add(x, r[0]), r[i], m[i]);
    }
  }
  return n;
}

GroupSolution int_solution(std::vector<std::int64_t> h, std::span<const std::int64_t> moduli,
                           std::span<const std::int64_t> r) {
  std::int64_t sum = 0;
  for (std::size_t k = 0; k < h.size(); ++k) sum = checked_add(sum, checked_add(checked_mul(h[k], moduli[k]), r[k]));
  const auto L = static_cast<std::int64_t>(h.size());
  return {std::move(h), rounded_mean(sum, L), static_cast<double>(sum) / static_cast<double>(L)};
}

RealGroupSolution real_solution(std::vector<std::int64_t> h, std::span<const std::int64_t> moduli,
                                std::span<const double> r) {
  double sum = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) sum += static_cast<double>(h[k]) * static_cast<double>(moduli[k]) + r[k];
  const double mean = sum / static_cast<double>(h.size());
  return {std::move(h), mean};
}

CrtSystem tail_of(const std::vector<std::int64_t>& cofactors) {
  return CrtSystem(std::vector<std::int64_t>(cofactors.begin() + 1, cofactors.end()));
}

std::vector<std::int64_t> inverses_of(const std::vector<std::int64_t>& cofactors) {
  std::vector<std::int64_t> out;
  for (std::size_t k = 1; k < cofactors.size(); ++k) out.push_back(mod_inverse(cofactors[0], cofactors[k]));
  return out;
}

}  // namespace

ModuliGroup::ModuliGroup(std::vector<std::int64_t> moduli)
    : moduli_(validated(std::move(moduli))),
      cofactors_(cofactors_of(moduli_)),
      gcd_(gcd_of(moduli_)),
      eta_(product_times(gcd_, cofactors_)),
      tail_(tail_of(cofactors_)),
      inv_(inverses_of(cofactors_)) {}

GroupSolution single_stage_robust_crt(const ModuliGroup& group, std::span<const std::int64_t> remainders) {
  return int_solution(group_foldings(group, remainders), group.moduli(), remainders);
}

RealGroupSolution single_stage_robust_crt(const ModuliGroup& group, std::span<const double> remainders) {
  return real_solution(group_foldings(group, remainders), group.moduli(), remainders);
}

GroupSolution single_stage_general(const CrtSystem& system, std::span<const std::int64_t> remainders) {
  return int_solution(general_foldings(system, remainders), system.moduli(), remainders);
}

RealGroupSolution single_stage_general(const CrtSystem& system, std::span<const double> remainders) {
  return real_solution(general_foldings(system, remainders), system.moduli(), remainders);
}

double single_stage_tau_bound(std::span<const std::int64_t> moduli) {
  return static_cast<double>(gcd_of(moduli)) / 4.0;
}

namespace {

bool overlap(const ModuliGroup& a, const ModuliGroup& b) {
  for (const auto x : a.moduli()) {
    if (std::find(b.moduli().begin(), b.moduli().end(), x) != b.moduli().end()) return true;
  }
  return false;
}

}  // namespace

CascadeSpec::CascadeSpec(ModuliGroup first, ModuliGroup second, int j)
    : g1_(first.eta() <= second.eta() ? first : second),
      g2_(first.eta() <= second.eta() ? second : first),
      swapped_(first.eta() > second.eta()),
      overlapping_(overlap(first, second)),
      cross_(TwoModSystem::from_moduli(g1_.eta(), g2_.eta())),
      ctx_(cross_, j) {}

std::vector<std::int64_t> CascadeSpec::caller_moduli() const {
  const auto& a = swapped_ ? g2_ : g1_;
  const auto& b = swapped_ ? g1_ : g2_;
  std::vector<std::int64_t> out(a.moduli());
  out.insert(out.end(), b.moduli().begin(), b.moduli().end());
  return out;
}

namespace {

template <class T>
CascadeSolution cascade_impl(const CascadeSpec& spec, std::span<const T> remainders) {
  if (remainders.size() != spec.total_moduli()) {
    throw ArgumentError("cascade expects " + std::to_string(spec.total_moduli()) + " remainders, got " +
                        std::to_string(remainders.size()));
  }
  const ModuliGroup& caller_first = spec.swapped() ? spec.group2() : spec.group1();
  const std::size_t split = caller_first.size();
  auto ra = remainders.subspan(0, split);
  auto rb = remainders.subspan(split);
  // r1 belongs to group1 (smaller eta)
  const auto r1 = spec.swapped() ? rb : ra;
  const auto r2 = spec.swapped() ? ra : rb;

  CascadeSolution out;
  std::vector<std::int64_t> h1, h2;
  if constexpr (std::is_same_v<T, double>) {
    auto s1 = single_stage_robust_crt(spec.group1(), r1);
    auto s2 = single_stage_robust_crt(spec.group2(), r2);
    out.group_estimate1 = s1.estimate;
    out.group_estimate2 = s2.estimate;
    const auto outer = algorithm2_real(spec.context(), RealObservation{s1.estimate, s2.estimate});
    out.l1 = outer.n1_hat;
    out.l2 = outer.n2_hat;
    h1 = std::move(s1.h);
    h2 = std::move(s2.h);
  } else {
    auto s1 = single_stage_robust_crt(spec.group1(), r1);
    auto s2 = single_stage_robust_crt(spec.group2(), r2);
    out.group_estimate1 = static_cast<double>(s1.estimate);
    out.group_estimate2 = static_cast<double>(s2.estimate);
    const auto outer = algorithm2(spec.context(), IntObservation{s1.estimate, s2.estimate});
    out.l1 = outer.n1_hat;
    out.l2 = outer.n2_hat;
    h1 = std::move(s1.h);
    h2 = std::move(s2.h);
  }

  auto totals = [](const ModuliGroup& g, std::int64_t l, const std::vector<std::int64_t>& h) {
    std::vector<std::int64_t> t;
    for (std::size_t k = 0; k < g.size(); ++k) t.push_back(checked_add(checked_mul(l, g.eta() / g.moduli()[k]), h[k]));
    return t;
  };
  auto t1 = totals(spec.group1(), out.l1, h1);
  auto t2 = totals(spec.group2(), out.l2, h2);
  if (spec.swapped()) {
    std::swap(t1, t2);
    std::swap(h1, h2);
  }
  out.h = h1;
  out.h.insert(out.h.end(), h2.begin(), h2.end());
  out.total_foldings = t1;
  out.total_foldings.insert(out.total_foldings.end(), t2.begin(), t2.end());

  const auto moduli = spec.caller_moduli();
  const auto L = static_cast<std::int64_t>(moduli.size());
  if constexpr (std::is_same_v<T, double>) {
    double sum = 0.0;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      sum += static_cast<double>(out.total_foldings[i]) * static_cast<double>(moduli[i]) + remainders[i];
    }
    out.mean = sum / static_cast<double>(L);
    out.N_hat = round_half_up(out.mean);
  } else {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      sum = checked_add(sum, checked_add(checked_mul(out.total_foldings[i], moduli[i]), remainders[i]));
    }
    out.mean = static_cast<double>(sum) / static_cast<double>(L);
    out.N_hat = rounded_mean(sum, L);
  }
  return out;
}

}  // namespace

CascadeSolution cascade_reconstruct(const CascadeSpec& spec, std::span<const std::int64_t> remainders) {
  return cascade_impl(spec, remainders);
}

CascadeSolution cascade_reconstruct(const CascadeSpec& spec, std::span<const double> remainders) {
  return cascade_impl(spec, remainders);
}

CascadeBounds cascade_bounds(const CascadeSpec& spec) {
  const auto& level = spec.context().level();
  const std::int64_t limit =
      std::min({spec.group1().group_gcd(), spec.group2().group_gcd(), spec.cross_system().m() * level.sigma_j});
  return {level.dynamic_range, static_cast<double>(limit) / 4.0};
}

}  // namespace rrcrt
