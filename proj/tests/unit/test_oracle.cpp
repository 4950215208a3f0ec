#include <doctest.h>

#include <numeric>
#include <random>

#include "rrcrt/crt_core.hpp"
#include "rrcrt/oracle.hpp"

using namespace rrcrt;

TEST_CASE("exhaustive folding search") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  const auto best = exhaustive_folding_search(s, IntObservation{69, 240}, 1170);
  CHECK(best.n1_hat == 4);
  CHECK(best.n2_hat == 2);
  const auto a = algorithm2(s, IntObservation{69, 240}, 3);
  CHECK(a.n1_hat == best.n1_hat);
  CHECK(a.n2_hat == best.n2_hat);

  const auto e = TwoModSystem::from_moduli(40, 136);
  const auto b = exhaustive_folding_search(e, IntObservation{23, 98}, 280);
  CHECK(b.n1_hat == 2);
  CHECK(b.n2_hat == 0);

  for (std::int64_t N = 0; N < 280; N += 3) {
    CHECK(exhaustive_folding_search(e, IntObservation{N % 40, N % 136}, 280).N_hat == N);
  }
  CHECK_THROWS_AS(exhaustive_folding_search(e, IntObservation{0, 0}, 10000), ArgumentError);
}

TEST_CASE("definitional ladder depths") {
  const auto s = TwoModSystem::real(1.0, 18, 29);
  CHECK(n_ddot_definitional(s, 3) == LadderDepths{4, 3});
  CHECK(n_ddot_definitional(s, 5) == LadderDepths{28, 17});
  CHECK(n_ddot_definitional(TwoModSystem::real(1.0, 20, 49), 2) == LadderDepths{22, 8});
  CHECK_THROWS_AS(n_ddot_definitional(s, 6), ArgumentError);
}

TEST_CASE("definition agrees with closed form") {
  const auto r = verify_random_n_ddot(60, 200, 3);
  CHECK(r.passed());
  CHECK(verify_n_ddot(TwoModSystem::from_moduli(234, 377)).passed());
}

TEST_CASE("falsifiers are legal and break every level") {
  const auto s = TwoModSystem::from_moduli(234, 377);
  const std::int64_t expect_N[] = {468, 754, 1170, 1885, 6786};
  for (int j = 1; j <= 5; ++j) {
    const auto f = dynamic_range_falsifier(s, j);
    CHECK(f.N == expect_N[j - 1]);
    CHECK(f.legal);
    const auto sol = algorithm2_real(s, f.obs, j);
    CHECK(sol.n2_hat != f.n2);
  }
  const auto f = dynamic_range_falsifier(s, 1);
  CHECK(f.dr1 == 0.0);
  CHECK(f.dr2 == -45.5);
  CHECK(verify_falsifiers(s).passed());

  std::mt19937_64 gen(17);
  std::uniform_int_distribution<std::int64_t> d(2, 60);
  for (int i = 0; i < 200;) {
    std::int64_t a = d(gen), b = d(gen);
    if (a == b || std::gcd(a, b) != 1) continue;
    if (a > b) std::swap(a, b);
    ++i;
    const auto r = verify_falsifiers(TwoModSystem::from_moduli(3 * a, 3 * b));
    REQUIRE_MESSAGE(r.passed(), r.detail);
  }
}

TEST_CASE("algorithm 1 falsifier") {
  for (const auto& [m1, m2] : {std::pair<std::int64_t, std::int64_t>{234, 377}, {40, 136}, {24, 38}}) {
    const auto s = TwoModSystem::from_moduli(m1, m2);
    const auto f = algorithm1_falsifier(s);
    CHECK(f.N == robustness_level(s, 1).dynamic_range);
    CHECK(f.legal);
    CHECK(algorithm1_real(s, f.obs).n2_hat != f.n2);
  }
}

TEST_CASE("exhaustive suite on (24,38)") {
  const auto r = verify_exhaustive(TwoModSystem::from_moduli(24, 38));
  CHECK_MESSAGE(r.passed(), r.detail);
  CHECK(r.checked > 50000);
}

TEST_CASE("crt scan") {
  std::vector<std::int64_t> r{4, 24}, m{24, 38};
  CHECK(crt_scan(r, m) == 100);
  r = {0, 0};
  CHECK(crt_scan(r, m) == 0);
  r = {1, 2};
  m = {12, 18};
  CHECK_FALSE(crt_scan(r, m).has_value());
}

TEST_CASE("crt scan matches the CRT formula") {
  for (const auto& moduli : {std::vector<std::int64_t>{24, 38}, std::vector<std::int64_t>{12, 18},
                             std::vector<std::int64_t>{6, 10, 15}, std::vector<std::int64_t>{8, 9, 25}}) {
    const CrtSystem sys(moduli);
    const auto lcm = to_int64(sys.lcm());
    for (std::int64_t N = 0; N < lcm; N += (lcm > 2000 ? 7 : 1)) {
      const auto rem = remainders_of(N, sys);
      REQUIRE(crt_scan(rem, moduli) == to_int64(crt_reconstruct(rem, sys)));
    }
  }
}

TEST_CASE("nearest scan") {
  const std::vector<std::int64_t> m{120, 300, 210, 490};
  const std::vector<double> r{12000 % 120 + 1.0, 12000 % 300 - 2.0, 12000 % 210 + 0.5, 12000 % 490 - 1.0};
  CHECK(nearest_scan(r, m, 13230) == 12000);
}

TEST_CASE("report") {
  CHECK(make_report("x", "1", "1").agree);
  CHECK_FALSE(make_report("x", "1", "2").agree);
}
