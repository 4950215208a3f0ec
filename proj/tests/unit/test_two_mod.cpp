#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "rrcrt/two_mod.hpp"

using namespace rrcrt;

namespace {

std::pair<std::int64_t, std::int64_t> random_coprime(std::mt19937_64& gen, std::int64_t hi) {
  std::uniform_int_distribution<std::int64_t> d(2, hi);
  for (;;) {
    std::int64_t a = d(gen), b = d(gen);
    if (a == b || std::gcd(a, b) != 1) continue;
    if (a > b) std::swap(a, b);
    return {a, b};
  }
}

}  // namespace

TEST_CASE("system construction") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  CHECK(s.m() == 13);
  CHECK(s.gamma1() == 18);
  CHECK(s.gamma2() == 29);
  CHECK(s.lcm() == 6786);
  CHECK_THROWS_AS(TwoModSystem::from_moduli(377, 234), ArgumentError);
  CHECK_THROWS_AS(TwoModSystem::from_moduli(12, 36), ArgumentError);
  CHECK_THROWS_AS(TwoModSystem::real(2.5, 18, 27), ArgumentError);
  CHECK_THROWS_AS(TwoModSystem::real(-1.0, 18, 29), ArgumentError);
  CHECK_THROWS_AS(TwoModSystem::real(2.5, 18, 29).m(), ArgumentError);
}

TEST_CASE("sigma chain") {
  auto c = sigma_chain(18, 29);
  CHECK(c.sigma == std::vector<std::int64_t>{29, 18, 11, 7, 4, 3, 1});
  CHECK(c.K == 4);
  c = sigma_chain(20, 49);
  CHECK(c.sigma == std::vector<std::int64_t>{49, 20, 9, 2, 1});
  CHECK(c.K == 2);
  c = sigma_chain(2, 3);
  CHECK(c.sigma == std::vector<std::int64_t>{3, 2, 1});
  CHECK(c.K == 0);
}

TEST_CASE("sigma chain invariants for all coprime pairs up to 500") {
  for (std::int64_t b = 3; b <= 500; ++b) {
    for (std::int64_t a = 2; a < b; ++a) {
      if (std::gcd(a, b) != 1) continue;
      const auto c = sigma_chain(a, b);
      REQUIRE(c.sigma.back() == 1);
      REQUIRE(c.at(c.K) > 1);
      for (std::size_t i = 1; i < c.sigma.size(); ++i) {
        REQUIRE(c.sigma[i] < c.sigma[i - 1]);
        REQUIRE(std::gcd(c.sigma[i], c.sigma[i - 1]) == 1);
      }
    }
  }
}

TEST_CASE("delta chain") {
  auto d = delta_chain(TwoModSystem::from_moduli(24, 38));
  // 38,24 -> 14 -> min(10,4)=4 -> min(2,2)=2
  CHECK(d.delta == std::vector<std::int64_t>{38, 24, 14, 4, 2});
  CHECK(d.G == 3);
  CHECK(delta_chain(TwoModSystem::from_moduli(40, 136)).at(1) == 16);
  d = delta_chain(TwoModSystem::from_moduli(10, 12));
  CHECK(d.at(1) == 2);
  CHECK(d.G == 1);
  d = delta_chain(TwoModSystem::from_moduli(234, 377));
  for (const auto v : d.delta) CHECK(v % 13 == 0);
}

TEST_CASE("residue ladders") {
  const auto s = TwoModSystem::real(1.0, 18, 29);
  auto l = residue_ladder(s, 1, 4);
  CHECK(l.elements == std::vector<std::int64_t>{0, 18, 7, 25, 14});
  CHECK(l.d_min == 4);
  l = residue_ladder(s, 2, 1);
  CHECK(l.elements == std::vector<std::int64_t>{0, 11});
  CHECK(l.d_min == 11);
  l = residue_ladder(s, 2, 3);
  CHECK(l.d_min == 4);
  CHECK_THROWS_AS(residue_ladder(s, 2, 18), ArgumentError);
  CHECK_THROWS_AS(residue_ladder(s, 1, 0), ArgumentError);
  CHECK_THROWS_AS(residue_ladder(s, 3, 2), ArgumentError);
}

TEST_CASE("ladders hold distinct residues") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 40; ++i) {
    const auto [a, b] = random_coprime(gen, 80);
    const auto s = TwoModSystem::real(1.0, a, b);
    for (const int side : {1, 2}) {
      const auto n = (side == 2 ? a : b) - 1;
      const auto l = residue_ladder(s, side, n);
      CHECK(std::set<std::int64_t>(l.elements.begin(), l.elements.end()).size() == static_cast<std::size_t>(n + 1));
    }
  }
}

TEST_CASE("closed-form ladder depths") {
  const std::int64_t n1[] = {1, 3, 4, 8, 28};
  const std::int64_t n2[] = {1, 1, 3, 4, 17};
  for (int j = 1; j <= 5; ++j) {
    const auto d = n_ddot_closed_form(18, 29, j);
    CHECK(d.n1 == n1[j - 1]);
    CHECK(d.n2 == n2[j - 1]);
  }
  CHECK(n_ddot_closed_form(20, 49, 2) == LadderDepths{22, 8});
  CHECK(n_ddot_closed_form(20, 49, 3) == LadderDepths{48, 19});
  CHECK_THROWS_AS(n_ddot_closed_form(18, 29, 0), ArgumentError);
  CHECK_THROWS_AS(n_ddot_closed_form(18, 29, 6), ArgumentError);
}

TEST_CASE("level table") {
  const auto t = level_table(TwoModSystem::from_moduli(234, 377));
  REQUIRE(t.size() == 5);
  const std::int64_t ranges[] = {468, 754, 1170, 1885, 6786};
  const double bounds[] = {35.75, 22.75, 13, 9.75, 3.25};
  const std::int64_t sigmas[] = {11, 7, 4, 3, 1};
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(t[i].dynamic_range == ranges[i]);
    CHECK(t[i].robustness_bound == bounds[i]);
    CHECK(t[i].sigma_j == sigmas[i]);
  }

  const auto e1 = robustness_level(TwoModSystem::from_moduli(40, 136), 1);
  CHECK(e1.dynamic_range == 280);
  CHECK(e1.robustness_bound == 4.0);

  const auto e3 = robustness_level(TwoModSystem::from_moduli(600, 1470), 2);
  CHECK(e3.dynamic_range == 13230);
  CHECK(e3.robustness_bound == 15.0);
}

TEST_CASE("monotone trade-off, top level is plain CRT") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 100; ++i) {
    const auto [a, b] = random_coprime(gen, 300);
    const auto s = TwoModSystem::from_moduli(3 * a, 3 * b);
    const auto t = level_table(s);
    for (std::size_t k = 1; k < t.size(); ++k) {
      REQUIRE(t[k].dynamic_range > t[k - 1].dynamic_range);
      REQUIRE(t[k].robustness_bound < t[k - 1].robustness_bound);
    }
    CHECK(t.back().dynamic_range == s.lcm());
    CHECK(t.back().robustness_bound == 0.75);
  }
}

TEST_CASE("worked reconstructions") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  const LevelContext ctx(s, 3);
  CHECK(ctx.inv12() == 21);
  const auto a = algorithm2(ctx, IntObservation{69, 240});
  CHECK(a.n1_hat == 4);
  CHECK(a.n2_hat == 2);
  CHECK(a.N_hat == 1000);
  CHECK(a.mean == 999.5);

  const auto e = TwoModSystem::from_moduli(40, 136);
  auto b = algorithm1(e, IntObservation{28, 15});
  CHECK(b.n1_hat == 3);
  CHECK(b.n2_hat == 1);
  CHECK(b.N_hat == 150);
  b = algorithm1(e, IntObservation{23, 98});
  CHECK(b.n1_hat == 2);
  CHECK(b.n2_hat == 0);
  CHECK(b.N_hat == 101);
  CHECK(algorithm2(e, IntObservation{30, 14}, 1).N_hat == 150);

  CHECK(estimate_N(4, 2, IntObservation{69, 240}, s) == 1000);
  CHECK(estimate_N(2, 0, IntObservation{23, 98}, e) == 101);
}

TEST_CASE("top level with exact remainders is CRT") {
  const auto s = TwoModSystem::from_moduli(24, 38);
  const LevelContext ctx(s, sigma_chain(s).level_count());
  for (std::int64_t N = 0; N < s.lcm(); ++N) {
    const auto r = algorithm2(ctx, IntObservation{N % 24, N % 38});
    REQUIRE(r.N_hat == N);
  }
}

TEST_CASE("branches follow the sign of q") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  for (int j = 1; j <= 5; ++j) {
    const LevelContext ctx(s, j);
    for (std::int64_t N = 0; N < ctx.level().dynamic_range; ++N) {
      const std::int64_t r1 = N % 234, r2 = N % 377;
      const auto sol = algorithm2(ctx, IntObservation{r1, r2});
      REQUIRE(sol.n1_hat == N / 234);
      REQUIRE(sol.n2_hat == N / 377);
      if (r1 == r2) REQUIRE((sol.n1_hat == 0 && sol.n2_hat == 0));
    }
  }
}

TEST_CASE("algorithm 1 matches algorithm 2 at level 1 inside the guarantee region") {
  std::mt19937_64 gen(2024);
  int compared = 0;
  for (int sys = 0; sys < 20; ++sys) {
    const auto [a, b] = random_coprime(gen, 60);
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 12)(gen);
    const auto s = TwoModSystem::from_moduli(m * a, m * b);
    const LevelContext ctx(s, 1);
    const std::int64_t range = ctx.level().dynamic_range;
    const std::int64_t half = m * ctx.sigma_j();  // 2 |dr1 - dr2| < m sigma_1
    for (int t = 0; t < 5000; ++t) {
      const std::int64_t N = std::uniform_int_distribution<std::int64_t>(0, range - 1)(gen);
      const std::int64_t r1 = N % s.m1(), r2 = N % s.m2();
      const std::int64_t d1 = std::uniform_int_distribution<std::int64_t>(-r1, s.m1() - 1 - r1)(gen);
      const std::int64_t d2 = std::uniform_int_distribution<std::int64_t>(-r2, s.m2() - 1 - r2)(gen);
      const std::int64_t twice = 2 * (d1 - d2);
      if (twice < -half || twice >= half) continue;
      const IntObservation obs{r1 + d1, r2 + d2};
      const auto x = algorithm1(s, obs);
      const auto y = algorithm2(ctx, obs);
      REQUIRE(x.n1_hat == y.n1_hat);
      REQUIRE(x.n2_hat == y.n2_hat);
      ++compared;
    }
  }
  CHECK(compared > 1000);
}

TEST_CASE("real mode") {
  SUBCASE("unit m gives the integer answer") {
    const auto si = TwoModSystem::from_moduli(18, 29);
    const auto sr = TwoModSystem::real(1.0, 18, 29);
    for (std::int64_t N = 0; N < 522; N += 7) {
      for (int j = 1; j <= 5; ++j) {
        const auto a = algorithm2(si, IntObservation{N % 18, N % 29}, j);
        const auto b = algorithm2_real(sr, RealObservation{double(N % 18), double(N % 29)}, j);
        REQUIRE(a.n1_hat == b.n1_hat);
        REQUIRE(a.n2_hat == b.n2_hat);
      }
    }
  }
  SUBCASE("m = 2.5 at level 3") {
    // range at j=3 is min(72.5*4, 45*5) = 225, bound 2.5
    const auto s = TwoModSystem::real(2.5, 18, 29);
    CHECK(robustness_level(s, 3).real_dynamic_range == 225.0);
    const double N = 200.3;
    const double r1 = std::fmod(N, 45.0), r2 = std::fmod(N, 72.5);
    for (const double d1 : {-1.0, 0.0, 1.0}) {
      for (const double d2 : {-1.0, 0.0, 1.0}) {
        const auto sol = algorithm2_real(s, RealObservation{r1 + d1, r2 + d2}, 3);
        CHECK(sol.n1_hat == 4);
        CHECK(sol.n2_hat == 2);
        CHECK(std::abs(sol.N_hat - N) <= 1.0 + 1e-9);
      }
    }
  }
  SUBCASE("zero errors") {
    const auto s = TwoModSystem::real(3.7, 11, 30);
    const auto top = sigma_chain(s).level_count();
    for (double N = 0.0; N < robustness_level(s, top).real_dynamic_range; N += 1.37) {
      const auto sol = algorithm2_real(s, RealObservation{std::fmod(N, s.real_m1()), std::fmod(N, s.real_m2())}, top);
      REQUIRE(sol.N_hat == doctest::Approx(N).epsilon(1e-12));
    }
  }
}

TEST_CASE("range checks") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  CHECK(in_range(s, IntObservation{0, 376}));
  CHECK_FALSE(in_range(s, IntObservation{234, 0}));
  CHECK_FALSE(in_range(s, RealObservation{-0.1, 0.0}));
}

TEST_CASE("delta baseline brackets the sigma ranges") {
  const auto rows = delta_baseline(TwoModSystem::from_moduli(234, 377));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].delta_i == 143);
  CHECK(rows[0].exact_range == 468);
  CHECK(rows[1].range_lower == 936);
  CHECK(rows[1].exact_range == 1170);
  CHECK(rows[1].range_upper == 1638);
  CHECK(rows[2].range_lower == 3744);
  CHECK(rows[2].exact_range == 6786);

  std::mt19937_64 gen(77);
  for (int i = 0; i < 20; ++i) {
    const auto [a, b] = random_coprime(gen, 200);
    const std::int64_t m = std::uniform_int_distribution<std::int64_t>(1, 9)(gen);
    for (const auto& r : delta_baseline(TwoModSystem::from_moduli(m * a, m * b))) {
      CHECK(r.exact_range >= r.range_lower);
      CHECK(r.exact_range <= r.range_upper);
    }
  }
}
