#include <doctest.h>

#include <cmath>
#include <random>

#include "rrcrt/multi_mod.hpp"
#include "rrcrt/oracle.hpp"

using namespace rrcrt;

namespace {

std::vector<std::int64_t> exact(std::int64_t N, const std::vector<std::int64_t>& moduli) {
  std::vector<std::int64_t> r;
  for (const auto m : moduli) r.push_back(N % m);
  return r;
}

}  // namespace

TEST_CASE("moduli group") {
  const ModuliGroup g({120, 300});
  CHECK(g.group_gcd() == 60);
  CHECK(g.cofactors() == std::vector<std::int64_t>{2, 5});
  CHECK(g.eta() == 600);
  CHECK_THROWS_AS(ModuliGroup({12, 18, 24}), ArgumentError);
  CHECK_THROWS_AS(ModuliGroup({12}), ArgumentError);
}

TEST_CASE("single-stage worked example") {
  const ModuliGroup g({120, 300});
  const std::vector<std::int64_t> r{82, 120};
  const auto s = single_stage_robust_crt(g, r);
  CHECK(s.h == std::vector<std::int64_t>{3, 1});
  CHECK(s.estimate == 431);
}

TEST_CASE("single-stage zero errors") {
  const ModuliGroup g({210, 490});
  for (std::int64_t N = 0; N < g.eta(); ++N) {
    const auto s = single_stage_robust_crt(g, exact(N, g.moduli()));
    REQUIRE(s.estimate == N);
  }
  const ModuliGroup three({6 * 5, 6 * 7, 6 * 11});
  for (std::int64_t N = 0; N < three.eta(); N += 13) REQUIRE(single_stage_robust_crt(three, exact(N, three.moduli())).estimate == N);
}

TEST_CASE("single-stage exhaustive on (120,300), errors up to 14") {
  const ModuliGroup g({120, 300});
  std::int64_t cases = 0;
  for (std::int64_t N = 0; N < 600; ++N) {
    const std::int64_t r1 = N % 120, r2 = N % 300;
    for (std::int64_t d1 = -14; d1 <= 14; ++d1) {
      if (r1 + d1 < 0 || r1 + d1 >= 120) continue;
      for (std::int64_t d2 = -14; d2 <= 14; ++d2) {
        if (r2 + d2 < 0 || r2 + d2 >= 300) continue;
        const std::vector<std::int64_t> r{r1 + d1, r2 + d2};
        const auto s = single_stage_robust_crt(g, r);
        REQUIRE(s.h == std::vector<std::int64_t>{N / 120, N / 300});
        REQUIRE(std::abs(s.estimate - N) <= 14);
        ++cases;
      }
    }
  }
  CHECK(cases > 400000);
}

TEST_CASE("single-stage (210,490) over an error grid") {
  const ModuliGroup g({210, 490});
  for (std::int64_t N = 0; N < 1470; ++N) {
    for (std::int64_t d1 = -17; d1 <= 17; d1 += 2) {
      for (std::int64_t d2 = -17; d2 <= 17; d2 += 3) {
        const std::int64_t a = N % 210 + d1, b = N % 490 + d2;
        if (a < 0 || a >= 210 || b < 0 || b >= 490) continue;
        const auto s = single_stage_robust_crt(g, std::vector<std::int64_t>{a, b});
        REQUIRE(s.h == std::vector<std::int64_t>{N / 210, N / 490});
        REQUIRE(std::abs(s.estimate - N) <= 17);
      }
    }
  }
}

TEST_CASE("single-stage over non-coprime cofactors") {
  const CrtSystem all({120, 300, 210, 490});
  CHECK(single_stage_tau_bound(all.moduli()) == 2.5);
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<std::int64_t> pickN(0, 29399), pickD(-2, 2);
  for (int t = 0; t < 20000; ++t) {
    const std::int64_t N = pickN(gen);
    auto r = exact(N, all.moduli());
    std::vector<std::int64_t> truth;
    for (std::size_t i = 0; i < r.size(); ++i) {
      truth.push_back(N / all.moduli()[i]);
      r[i] += pickD(gen);
    }
    const auto s = single_stage_general(all, r);
    REQUIRE(s.h == truth);
    REQUIRE(std::abs(s.estimate - N) <= 2);
  }
}

TEST_CASE("cascade bounds for the example system") {
  const CascadeSpec spec(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 2);
  CHECK(spec.cross_system().m() == 30);
  CHECK(spec.cross_system().m1() == 600);
  CHECK(spec.cross_system().m2() == 1470);
  CHECK(spec.context().sigma_j() == 2);
  CHECK(spec.context().level().n_ddot_1 == 22);
  CHECK(spec.context().level().n_ddot_2 == 8);
  const auto b = cascade_bounds(spec);
  CHECK(b.dynamic_range == 13230);
  CHECK(b.tau_bound == 15.0);
  CHECK(b.dynamic_range < 29400);

  const CascadeSpec top(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 3);
  CHECK(cascade_bounds(top).tau_bound == 7.5);

  const CascadeSpec low(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 1);
  CHECK(cascade_bounds(low).tau_bound == std::min({60.0, 70.0, 30.0 * 9}) / 4.0);
}

TEST_CASE("cascade orders groups and keeps caller order") {
  const CascadeSpec spec(ModuliGroup({210, 490}), ModuliGroup({120, 300}), 2);
  CHECK(spec.swapped());
  CHECK(spec.group1().eta() == 600);
  const auto moduli = spec.caller_moduli();
  CHECK(moduli == std::vector<std::int64_t>{210, 490, 120, 300});
  const auto sol = cascade_reconstruct(spec, exact(13000, moduli));
  CHECK(sol.N_hat == 13000);
  for (std::size_t i = 0; i < moduli.size(); ++i) CHECK(sol.total_foldings[i] == 13000 / moduli[i]);
  CHECK_FALSE(spec.overlapping());
  CHECK(CascadeSpec(ModuliGroup({120, 300}), ModuliGroup({300, 490}), 1).overlapping());
}

TEST_CASE("cascade with errors up to 14") {
  const CascadeSpec spec(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 2);
  const auto moduli = spec.caller_moduli();
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::int64_t> pickN(0, 13229), pickD(-14, 14);
  for (int t = 0; t < 10000; ++t) {
    const std::int64_t N = pickN(gen);
    auto r = exact(N, moduli);
    std::int64_t worst = 0;
    for (auto& x : r) {
      const auto d = pickD(gen);
      x += d;
      worst = std::max(worst, std::abs(d));
    }
    const auto sol = cascade_reconstruct(spec, r);
    for (std::size_t i = 0; i < moduli.size(); ++i) REQUIRE(sol.total_foldings[i] == N / moduli[i]);
    REQUIRE(std::abs(sol.N_hat - N) <= worst);
  }
}

TEST_CASE("cascade congruences agree when exact") {
  const CascadeSpec spec(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 2);
  const auto moduli = spec.caller_moduli();
  for (std::int64_t N = 0; N < 13230; N += 37) {
    const auto r = exact(N, moduli);
    const auto sol = cascade_reconstruct(spec, r);
    for (std::size_t i = 0; i < moduli.size(); ++i) REQUIRE(sol.total_foldings[i] * moduli[i] + r[i] == N);
  }
}

TEST_CASE("cascade breaks at its dynamic range") {
  const CascadeSpec spec(ModuliGroup({120, 300}), ModuliGroup({210, 490}), 2);
  const auto f = dynamic_range_falsifier(spec.cross_system(), 2);
  REQUIRE(f.N == 13230);
  REQUIRE(f.legal);
  // shift every remainder of a group by that group's outer error
  std::vector<double> r;
  for (const auto m : spec.group1().moduli()) r.push_back(static_cast<double>(f.N % m) + f.dr1);
  for (const auto m : spec.group2().moduli()) r.push_back(static_cast<double>(f.N % m) + f.dr2);
  CHECK(std::max(std::abs(f.dr1), std::abs(f.dr2)) <= 15.0);
  const auto sol = cascade_reconstruct(spec, r);
  bool wrong = false;
  const auto moduli = spec.caller_moduli();
  for (std::size_t i = 0; i < moduli.size(); ++i) wrong = wrong || sol.total_foldings[i] != f.N / moduli[i];
  CHECK(wrong);
}
