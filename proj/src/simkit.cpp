#include "rrcrt/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "rrcrt/multi_mod.hpp"
#include "rrcrt/two_mod.hpp"

namespace rrcrt {

namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

TrialRng::TrialRng(std::uint64_t seed, std::uint64_t point, std::uint64_t trial)
    : state_(mix(mix(mix(seed) ^ point) ^ trial)) {}

std::uint64_t TrialRng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double TrialRng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double TrialRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::int64_t TrialRng::below(std::int64_t n) {
  if (n < 1) throw ArgumentError("below: n must be positive");
  return static_cast<std::int64_t>((static_cast<u128>(next()) * static_cast<std::uint64_t>(n)) >> 64);
}

std::int64_t TrialRng::between(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }

std::string to_string(RangePolicy p) { return p == RangePolicy::clamp ? "clamp" : "unclamped"; }
std::string to_string(ErrorModel e) { return e == ErrorModel::uniform_integer ? "uniform_integer" : "uniform_real"; }
std::string to_string(AlgorithmChoice a) {
  switch (a) {
    case AlgorithmChoice::alg1: return "alg1";
    case AlgorithmChoice::alg2: return "alg2";
    default: return "auto";
  }
}

RangePolicy parse_range_policy(const std::string& s) {
  if (s == "clamp") return RangePolicy::clamp;
  if (s == "unclamped") return RangePolicy::unclamped;
  throw ArgumentError("unknown range policy '" + s + "' (expected clamp or unclamped)");
}

ErrorModel parse_error_model(const std::string& s) {
  if (s == "uniform_real" || s == "real") return ErrorModel::uniform_real;
  if (s == "uniform_integer" || s == "integer") return ErrorModel::uniform_integer;
  throw ArgumentError("unknown error model '" + s + "' (expected uniform_real or uniform_integer)");
}

AlgorithmChoice parse_algorithm(const std::string& s) {
  if (s == "auto") return AlgorithmChoice::automatic;
  if (s == "alg1" || s == "1") return AlgorithmChoice::alg1;
  if (s == "alg2" || s == "2") return AlgorithmChoice::alg2;
  throw ArgumentError("unknown algorithm '" + s + "' (expected auto, alg1 or alg2)");
}

namespace {

constexpr std::int64_t kBlock = 1024;

struct Acc {
  double abs_sum = 0.0;
  double rel_sum = 0.0;
  std::int64_t failures = 0;
  std::int64_t out_of_range = 0;
  std::int64_t rel_excluded = 0;
  std::int64_t trials = 0;

  void add(const Acc& o) {
    abs_sum += o.abs_sum;
    rel_sum += o.rel_sum;
    failures += o.failures;
    out_of_range += o.out_of_range;
    rel_excluded += o.rel_excluded;
    trials += o.trials;
  }

  void record(double N, double N_hat, bool failed) {
    const double err = std::abs(N_hat - N);
    abs_sum += err;
    if (N >= 1.0) {
      rel_sum += err / N;
    } else {
      ++rel_excluded;
    }
    if (failed) ++failures;
    ++trials;
  }

  SweepRow row(double x) const {
    SweepRow r;
    r.x = x;
    r.trials = trials;
    r.rel_excluded = rel_excluded;
    if (trials > 0) {
      r.mean_abs_error = abs_sum / static_cast<double>(trials);
      r.failure_rate = static_cast<double>(failures) / static_cast<double>(trials);
      r.clamped_fraction = static_cast<double>(out_of_range) / static_cast<double>(trials);
    }
    if (trials > rel_excluded) r.mean_rel_error = rel_sum / static_cast<double>(trials - rel_excluded);
    return r;
  }
};

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs trials in fixed blocks and merges block sums in block order, so the
// floating-point totals do not depend on scheduling.
template <class Fn>
std::vector<Acc> run_blocks(std::int64_t trials, std::size_t series, unsigned threads, Fn&& trial) {
  if (trials < 1) throw ArgumentError("trials per point must be >= 1");
  const std::int64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::vector<Acc>> partial(static_cast<std::size_t>(blocks), std::vector<Acc>(series));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < blocks; b = next++) {
      auto& acc = partial[static_cast<std::size_t>(b)];
      const std::int64_t end = std::min(trials, (b + 1) * kBlock);
      for (std::int64_t t = b * kBlock; t < end; ++t) trial(t, acc);
    }
  };
  const unsigned n = std::min<std::int64_t>(thread_count(threads), blocks);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<Acc> total(series);
  for (const auto& p : partial) {
    for (std::size_t s = 0; s < series; ++s) total[s].add(p[s]);
  }
  return total;
}

// One noisy remainder. Returns true when the noisy value left [0, m).
template <class T>
bool perturb(T& r, T delta, std::int64_t m, RangePolicy policy) {
  r += delta;
  const bool out = r < T(0) || r >= static_cast<T>(m);
  if (out && policy == RangePolicy::clamp) {
    if (r < T(0)) {
      r = T(0);
    } else if constexpr (std::is_same_v<T, double>) {
      r = std::nextafter(static_cast<double>(m), 0.0);
    } else {
      r = m - 1;
    }
  }
  return out;
}

struct TwoModRunner {
  const TrialConfig& cfg;
  TwoModSystem system;
  LevelContext ctx;
  bool use_alg1;

  explicit TwoModRunner(const TrialConfig& c)
      : cfg(c),
        system(TwoModSystem::from_moduli(c.m1, c.m2)),
        ctx(system, c.level),
        use_alg1(c.algorithm == AlgorithmChoice::alg1) {
    if (use_alg1 && c.level != 1) throw ArgumentError("Algorithm 1 only covers level 1");
  }

  void trial(std::int64_t N, double tau, TrialRng& rng, Acc& acc) const {
    const std::int64_t m1 = system.m1();
    const std::int64_t m2 = system.m2();
    const std::int64_t n1 = N / m1;
    const std::int64_t n2 = N / m2;
    bool out = false;
    std::int64_t got1 = 0, got2 = 0;
    double N_hat = 0.0;
    if (cfg.error_model == ErrorModel::uniform_integer) {
      const auto t = static_cast<std::int64_t>(std::floor(tau));
      IntObservation obs{N % m1, N % m2};
      out |= perturb(obs.r1_tilde, rng.between(-t, t), m1, cfg.range_policy);
      out |= perturb(obs.r2_tilde, rng.between(-t, t), m2, cfg.range_policy);
      const auto sol = use_alg1 ? algorithm1(system, obs) : algorithm2(ctx, obs);
      got1 = sol.n1_hat;
      got2 = sol.n2_hat;
      N_hat = static_cast<double>(sol.N_hat);
    } else {
      RealObservation obs{static_cast<double>(N % m1), static_cast<double>(N % m2)};
      out |= perturb(obs.r1_tilde, rng.uniform(-tau, tau), m1, cfg.range_policy);
      out |= perturb(obs.r2_tilde, rng.uniform(-tau, tau), m2, cfg.range_policy);
      const auto sol = use_alg1 ? algorithm1_real(system, obs) : algorithm2_real(ctx, obs);
      got1 = sol.n1_hat;
      got2 = sol.n2_hat;
      N_hat = static_cast<double>(round_half_up(sol.N_hat));
    }
    if (out) ++acc.out_of_range;
    acc.record(static_cast<double>(N), N_hat, got1 != n1 || got2 != n2);
  }
};

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ArgumentError("tau values must be finite and nonnegative");
}

}  // namespace

SweepResult run_tau_sweep(const TrialConfig& config) {
  const TwoModRunner runner(config);
  const std::int64_t range = runner.ctx.level().dynamic_range;
  SweepResult result;
  result.series = config.algorithm == AlgorithmChoice::alg1 ? "alg1" : "level_" + std::to_string(config.level);
  for (std::size_t p = 0; p < config.taus.size(); ++p) {
    const double tau = config.taus[p];
    check_tau(tau);
    const auto acc = run_blocks(config.trials_per_point, 1, config.threads, [&](std::int64_t t, std::vector<Acc>& a) {
      TrialRng rng(config.seed, p, static_cast<std::uint64_t>(t));
      const std::int64_t N = rng.below(range);
      runner.trial(N, tau, rng, a[0]);
    });
    result.rows.push_back(acc[0].row(tau));
  }
  return result;
}

SweepResult run_boundary_probe(const TrialConfig& config, std::span<const std::int64_t> neighbors) {
  const TwoModRunner runner(config);
  const double tau = runner.ctx.level().robustness_bound;
  SweepResult result;
  result.series = "probe_level_" + std::to_string(config.level);
  for (std::size_t p = 0; p < neighbors.size(); ++p) {
    const std::int64_t N = neighbors[p];
    if (N < 0) throw ArgumentError("probe values must be nonnegative");
    const auto acc = run_blocks(config.trials_per_point, 1, config.threads, [&](std::int64_t t, std::vector<Acc>& a) {
      TrialRng rng(config.seed, p, static_cast<std::uint64_t>(t));
      runner.trial(N, tau, rng, a[0]);
    });
    result.rows.push_back(acc[0].row(static_cast<double>(N)));
  }
  return result;
}

std::vector<SweepResult> run_comparison(const ComparisonConfig& config) {
  const CascadeSpec target(ModuliGroup(config.group1), ModuliGroup(config.group2), config.level);
  const int top = sigma_chain(target.cross_system()).level_count();
  const CascadeSpec two_stage(ModuliGroup(config.group1), ModuliGroup(config.group2), top);
  const auto moduli = target.caller_moduli();
  const CrtSystem all(moduli);
  const std::int64_t range = cascade_bounds(target).dynamic_range;
  const std::size_t L = moduli.size();

  std::vector<SweepResult> out(3);
  out[0].series = "single_stage";
  out[1].series = "two_stage";
  out[2].series = "cascade_j" + std::to_string(config.level);

  for (std::size_t p = 0; p < config.taus.size(); ++p) {
    const double tau = config.taus[p];
    check_tau(tau);
    const auto acc = run_blocks(config.trials_per_point, 3, config.threads, [&](std::int64_t t, std::vector<Acc>& a) {
      TrialRng rng(config.seed, p, static_cast<std::uint64_t>(t));
      const std::int64_t N = rng.below(range);
      std::vector<std::int64_t> truth(L);
      for (std::size_t i = 0; i < L; ++i) truth[i] = N / moduli[i];
      bool out_of_range = false;

      auto score = [&](Acc& acc, const std::vector<std::int64_t>& n, double N_hat) {
        acc.record(static_cast<double>(N), N_hat, n != truth);
        if (out_of_range) ++acc.out_of_range;
      };

      if (config.error_model == ErrorModel::uniform_integer) {
        const auto ti = static_cast<std::int64_t>(std::floor(tau));
        std::vector<std::int64_t> r(L);
        for (std::size_t i = 0; i < L; ++i) {
          r[i] = N % moduli[i];
          out_of_range |= perturb(r[i], rng.between(-ti, ti), moduli[i], config.range_policy);
        }
        const auto s = single_stage_general(all, std::span<const std::int64_t>(r));
        score(a[0], s.h, static_cast<double>(s.estimate));
        const auto c2 = cascade_reconstruct(two_stage, std::span<const std::int64_t>(r));
        score(a[1], c2.total_foldings, static_cast<double>(c2.N_hat));
        const auto cj = cascade_reconstruct(target, std::span<const std::int64_t>(r));
        score(a[2], cj.total_foldings, static_cast<double>(cj.N_hat));
      } else {
        std::vector<double> r(L);
        for (std::size_t i = 0; i < L; ++i) {
          r[i] = static_cast<double>(N % moduli[i]);
          out_of_range |= perturb(r[i], rng.uniform(-tau, tau), moduli[i], config.range_policy);
        }
        const auto s = single_stage_general(all, std::span<const double>(r));
        score(a[0], s.h, static_cast<double>(round_half_up(s.estimate)));
        const auto c2 = cascade_reconstruct(two_stage, std::span<const double>(r));
        score(a[1], c2.total_foldings, static_cast<double>(c2.N_hat));
        const auto cj = cascade_reconstruct(target, std::span<const double>(r));
        score(a[2], cj.total_foldings, static_cast<double>(cj.N_hat));
      }
    });
    for (std::size_t s = 0; s < 3; ++s) out[s].rows.push_back(acc[s].row(tau));
  }
  return out;
}

}  // namespace rrcrt
