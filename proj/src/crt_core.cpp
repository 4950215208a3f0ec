#include "rrcrt/crt_core.hpp"

#include <numeric>
#include <string>

namespace rrcrt {

CrtSystem::CrtSystem(std::vector<std::int64_t> moduli)
    : factorization_(coprime_factorization(moduli)) {
  const auto n = factorization_.mu.size();
  M_.reserve(n);
  D_.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t mu = factorization_.mu[j];
    M_.push_back(factorization_.lcm / mu);
    if (mu == 1) {
      D_.push_back(0);
    } else {
      const auto m_red = static_cast<std::int64_t>(M_.back() % mu);
      D_.push_back(mod_inverse(m_red, mu));
    }
  }
}

std::vector<std::int64_t> remainders_of(const BigInt& N, const CrtSystem& system) {
  if (N < 0) throw ArgumentError("remainders_of: N must be nonnegative");
  std::vector<std::int64_t> out;
  out.reserve(system.size());
  for (const auto m : system.moduli()) out.push_back(static_cast<std::int64_t>(N % m));
  return out;
}

BigInt crt_formula(std::span<const std::int64_t> remainders, const CrtSystem& system) {
  if (remainders.size() != system.size()) {
    throw ArgumentError("crt: expected " + std::to_string(system.size()) + " remainders, got " +
                        std::to_string(remainders.size()));
  }
  BigInt sum = 0;
  for (std::size_t j = 0; j < remainders.size(); ++j) {
    if (system.D()[j] == 0) continue;
    sum += BigInt(remainders[j]) * system.D()[j] * system.M()[j];
  }
  BigInt out = sum % system.lcm();
  if (out < 0) out += system.lcm();
  return out;
}

BigInt crt_reconstruct(std::span<const std::int64_t> remainders, const CrtSystem& system) {
  const auto& m = system.moduli();
  if (remainders.size() != m.size()) {
    throw ArgumentError("crt: expected " + std::to_string(m.size()) + " remainders, got " +
                        std::to_string(remainders.size()));
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (remainders[i] < 0 || remainders[i] >= m[i]) {
      throw ArgumentError("crt: remainder " + std::to_string(remainders[i]) + " outside [0, " +
                          std::to_string(m[i]) + ")");
    }
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t k = i + 1; k < m.size(); ++k) {
      const auto g = std::gcd(m[i], m[k]);
      if ((remainders[i] - remainders[k]) % g != 0) {
        throw InconsistentRemainders("crt: remainders " + std::to_string(remainders[i]) + " mod " +
                                     std::to_string(m[i]) + " and " + std::to_string(remainders[k]) +
                                     " mod " + std::to_string(m[k]) + " disagree modulo " +
                                     std::to_string(g));
      }
    }
  }
  return crt_formula(remainders, system);
}

}  // namespace rrcrt
