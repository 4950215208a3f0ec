#include "rrcrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <set>
#include <vector>

namespace rrcrt {

OracleReport make_report(std::string instance, std::string expected, std::string computed) {
  OracleReport r{std::move(instance), std::move(expected), std::move(computed), false};
  r.agree = r.expected == r.computed;
  return r;
}

namespace {

template <class T>
FoldingSolution scan_nearest(const TwoModSystem& system, T r1t, T r2t, std::int64_t search_bound) {
  const std::int64_t m1 = system.m1();
  const std::int64_t m2 = system.m2();
  if (search_bound < 1 || search_bound > system.lcm()) throw ArgumentError("search bound must lie in [1, lcm]");
  std::int64_t best = 0;
  T best_dev{};
  bool first = true;
  std::int64_t r1 = 0, r2 = 0;
  for (std::int64_t N = 0; N < search_bound; ++N) {
    const T d1 = r1t > static_cast<T>(r1) ? r1t - static_cast<T>(r1) : static_cast<T>(r1) - r1t;
    const T d2 = r2t > static_cast<T>(r2) ? r2t - static_cast<T>(r2) : static_cast<T>(r2) - r2t;
    const T dev = d1 > d2 ? d1 : d2;
    if (first || dev < best_dev) {
      best = N;
      best_dev = dev;
      first = false;
    }
    if (++r1 == m1) r1 = 0;
    if (++r2 == m2) r2 = 0;
  }
  FoldingSolution out;
  out.n1_hat = best / m1;
  out.n2_hat = best / m2;
  out.N_hat = best;
  out.mean = static_cast<double>(best);
  return out;
}

// sigma_j by plain Euclid on the cofactors
std::int64_t sigma_at(std::int64_t g1, std::int64_t g2, int j) {
  std::int64_t a = g2, b = g1;
  for (int i = 0; i < j; ++i) {
    const std::int64_t c = a % b;
    a = b;
    b = c;
    if (b == 0) throw ArgumentError("level index beyond the sigma chain");
  }
  return b;
}

int top_level(std::int64_t g1, std::int64_t g2) {
  int j = 0;
  std::int64_t a = g2, b = g1;
  while (b > 1) {
    const std::int64_t c = a % b;
    a = b;
    b = c;
    ++j;
  }
  return j;  // sigma_j == 1
}

std::int64_t deepest(std::int64_t step, std::int64_t mod, std::int64_t sigma) {
  std::set<std::int64_t> seen{0};
  std::int64_t gap = mod;  // no pair yet
  std::int64_t n = 0;
  while (n + 1 < mod) {
    const std::int64_t v = ((n + 1) * step) % mod;
    auto it = seen.insert(v).first;
    std::int64_t g = gap;
    if (it != seen.begin()) g = std::min(g, v - *std::prev(it));
    if (std::next(it) != seen.end()) g = std::min(g, *std::next(it) - v);
    if (g < sigma) break;
    gap = g;
    ++n;
  }
  return n;
}

// element of {|t step|_mod : t = 0..depth} nearest v, ties to the smaller
std::int64_t nearest_rung(std::int64_t step, std::int64_t mod, std::int64_t depth, double v) {
  std::int64_t best = 0;
  double best_d = std::abs(v);
  for (std::int64_t t = 1; t <= depth; ++t) {
    const std::int64_t x = (t * step) % mod;
    const double d = std::abs(v - static_cast<double>(x));
    if (d < best_d || (d == best_d && x < best)) {
      best = x;
      best_d = d;
    }
  }
  return best;
}

void finish(Falsifier& f, const TwoModSystem& system, double sigma) {
  const double m = system.real_m();
  const auto r1 = static_cast<double>(f.N % system.m1());
  const auto r2 = static_cast<double>(f.N % system.m2());
  f.n1 = f.N / system.m1();
  f.n2 = f.N / system.m2();
  f.obs = {r1 + f.dr1, r2 + f.dr2};
  const double diff = (f.dr1 - f.dr2) / m;
  f.legal = diff >= -sigma / 2 && diff < sigma / 2 && in_range(system, f.obs);
}

}  // namespace

FoldingSolution exhaustive_folding_search(const TwoModSystem& system, const IntObservation& obs,
                                          std::int64_t search_bound) {
  return scan_nearest<std::int64_t>(system, obs.r1_tilde, obs.r2_tilde, search_bound);
}

FoldingSolution exhaustive_folding_search(const TwoModSystem& system, const RealObservation& obs,
                                          std::int64_t search_bound) {
  return scan_nearest<double>(system, obs.r1_tilde, obs.r2_tilde, search_bound);
}

LadderDepths n_ddot_definitional(const TwoModSystem& system, int j) {
  const std::int64_t g1 = system.gamma1();
  const std::int64_t g2 = system.gamma2();
  if (j < 1 || j > top_level(g1, g2)) throw ArgumentError("level index out of range");
  const std::int64_t sigma = sigma_at(g1, g2, j);
  return {deepest(g1, g2, sigma), deepest(g2, g1, sigma)};
}

Falsifier dynamic_range_falsifier(const TwoModSystem& system, int j) {
  const auto depth = n_ddot_definitional(system, j);
  const std::int64_t m = system.m();
  const std::int64_t A = system.m2() * (1 + depth.n2);
  const std::int64_t B = system.m1() * (1 + depth.n1);
  Falsifier f;
  f.j = j;
  if (A <= B) {
    // push r1 halfway toward the nearest S_2 rung; q then lands on that rung
    f.N = A;
    const auto r1 = static_cast<double>(A % system.m1());
    const std::int64_t w = nearest_rung(system.gamma2(), system.gamma1(), depth.n2, r1 / static_cast<double>(m));
    f.dr1 = (static_cast<double>(m * w) - r1) / 2.0;
  } else {
    f.N = B;
    const auto r2 = static_cast<double>(B % system.m2());
    const std::int64_t w = nearest_rung(system.gamma1(), system.gamma2(), depth.n1, r2 / static_cast<double>(m));
    f.dr2 = (static_cast<double>(m * w) - r2) / 2.0;
  }
  finish(f, system, static_cast<double>(sigma_at(system.gamma1(), system.gamma2(), j)));
  return f;
}

Falsifier algorithm1_falsifier(const TwoModSystem& system) {
  const std::int64_t m1 = system.m1();
  const std::int64_t m2 = system.m2();
  const std::int64_t s1 = system.gamma2() % system.gamma1();
  Falsifier f;
  f.j = 0;
  f.N = m1 * (1 + (m2 / m1) * (m1 / (m2 % m1)));
  f.dr1 = static_cast<double>((system.gamma1() % s1) / 2 * system.m());
  finish(f, system, static_cast<double>(s1));
  return f;
}

std::optional<std::int64_t> crt_scan(std::span<const std::int64_t> remainders, std::span<const std::int64_t> moduli) {
  if (remainders.size() != moduli.size() || moduli.empty()) return std::nullopt;
  std::int64_t lcm = 1;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] < 1 || remainders[i] < 0 || remainders[i] >= moduli[i]) return std::nullopt;
    lcm = checked_mul(lcm / std::gcd(lcm, moduli[i]), moduli[i]);
  }
  for (std::int64_t N = 0; N < lcm; ++N) {
    bool ok = true;
    for (std::size_t i = 0; i < moduli.size() && ok; ++i) ok = N % moduli[i] == remainders[i];
    if (ok) return N;
  }
  return std::nullopt;
}

std::int64_t nearest_scan(std::span<const double> remainders, std::span<const std::int64_t> moduli,
                          std::int64_t search_bound) {
  if (remainders.size() != moduli.size() || moduli.empty()) throw ArgumentError("remainder/moduli count mismatch");
  std::int64_t best = 0;
  double best_dev = 0.0;
  for (std::int64_t N = 0; N < search_bound; ++N) {
    double dev = 0.0;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      dev = std::max(dev, std::abs(remainders[i] - static_cast<double>(N % moduli[i])));
    }
    if (N == 0 || dev < best_dev) {
      best = N;
      best_dev = dev;
    }
  }
  return best;
}

SuiteResult verify_exhaustive(const TwoModSystem& system) {
  SuiteResult out{"exhaustive", 0, 0, ""};
  const std::int64_t m = system.m();
  const std::int64_t m1 = system.m1();
  const std::int64_t m2 = system.m2();
  for (int j = 1; j <= top_level(system.gamma1(), system.gamma2()); ++j) {
    const LevelContext ctx(system, j);
    const std::int64_t range = ctx.level().dynamic_range;
    const std::int64_t span2 = m * ctx.sigma_j();  // 2 (dr1 - dr2) in [-m sigma, m sigma)
    for (std::int64_t N = 0; N < range; ++N) {
      const std::int64_t r1 = N % m1;
      const std::int64_t r2 = N % m2;
      for (std::int64_t d1 = -r1; d1 < m1 - r1; ++d1) {
        for (std::int64_t d2 = -r2; d2 < m2 - r2; ++d2) {
          const std::int64_t twice = 2 * (d1 - d2);
          if (twice < -span2 || twice >= span2) continue;
          ++out.checked;
          const auto sol = algorithm2(ctx, IntObservation{r1 + d1, r2 + d2});
          const std::int64_t err = std::abs(sol.N_hat - N);
          if (sol.n1_hat != N / m1 || sol.n2_hat != N / m2 || err > std::max(std::abs(d1), std::abs(d2))) {
            if (out.failures++ == 0) {
              std::ostringstream os;
              os << "j=" << j << " N=" << N << " dr=(" << d1 << "," << d2 << ") got n=(" << sol.n1_hat << ","
                 << sol.n2_hat << ") N_hat=" << sol.N_hat;
              out.detail = os.str();
            }
          }
        }
      }
    }
  }
  if (out.failures == 0) out.detail = std::to_string(out.checked) + " cases";
  return out;
}

SuiteResult verify_n_ddot(const TwoModSystem& system) {
  SuiteResult out{"n_ddot", 0, 0, ""};
  for (int j = 1; j <= top_level(system.gamma1(), system.gamma2()); ++j) {
    ++out.checked;
    const auto closed = n_ddot_closed_form(system, j);
    const auto def = n_ddot_definitional(system, j);
    if (!(closed == def) && out.failures++ == 0) {
      std::ostringstream os;
      os << "gamma=(" << system.gamma1() << "," << system.gamma2() << ") j=" << j << " closed=(" << closed.n1 << ","
         << closed.n2 << ") definitional=(" << def.n1 << "," << def.n2 << ")";
      out.detail = os.str();
    }
  }
  if (out.failures == 0) out.detail = std::to_string(out.checked) + " levels";
  return out;
}

SuiteResult verify_falsifiers(const TwoModSystem& system) {
  SuiteResult out{"falsify", 0, 0, ""};
  std::ostringstream summary;
  for (int j = 1; j <= top_level(system.gamma1(), system.gamma2()); ++j) {
    ++out.checked;
    const auto f = dynamic_range_falsifier(system, j);
    const auto sol = algorithm2_real(system, f.obs, j);
    const bool broke = sol.n2_hat != f.n2;
    summary << (j > 1 ? " " : "") << "j=" << j << ":N=" << f.N << (broke ? ":broken" : ":held");
    if ((!f.legal || !broke) && out.failures++ == 0) {
      std::ostringstream os;
      os << "j=" << j << " N=" << f.N << " dr=(" << f.dr1 << "," << f.dr2 << ") legal=" << f.legal
         << " n2=" << f.n2 << " got=" << sol.n2_hat;
      out.detail = os.str();
    }
  }
  if (out.failures == 0) out.detail = summary.str();
  return out;
}

SuiteResult verify_random_n_ddot(int count, std::int64_t gamma_max, std::uint64_t seed) {
  if (count < 1 || gamma_max < 3) throw ArgumentError("need count >= 1 and gamma_max >= 3");
  SuiteResult out{"random_n_ddot", 0, 0, ""};
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::int64_t> pick(2, gamma_max);
  for (int done = 0; done < count;) {
    std::int64_t a = pick(gen), b = pick(gen);
    if (a == b || std::gcd(a, b) != 1) continue;
    if (a > b) std::swap(a, b);
    ++done;
    const auto r = verify_n_ddot(TwoModSystem::real(1.0, a, b));
    out.checked += r.checked;
    if (r.failures > 0 && out.failures == 0) out.detail = r.detail;
    out.failures += r.failures;
  }
  if (out.failures == 0) out.detail = std::to_string(count) + " systems, " + std::to_string(out.checked) + " levels";
  return out;
}

}  // namespace rrcrt
