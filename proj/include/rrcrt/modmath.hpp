#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace rrcrt {

using BigInt = boost::multiprecision::cpp_int;

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class NoInverseError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct GcdLcm {
  std::int64_t gcd = 0;
  BigInt lcm;
};

/// gcd and lcm of a non-empty list of positive integers. The lcm is exact.
GcdLcm gcd_lcm(std::span<const std::int64_t> values);

/// x in [0, n) with a*x = 1 (mod n). Returns 0 for n == 1.
std::int64_t mod_inverse(std::int64_t a, std::int64_t n);
BigInt mod_inverse(const BigInt& a, const BigInt& n);

/// Pairwise coprime mu_i with mu_i | m_i and prod(mu_i) = lcm(m).
///
/// Every prime power p^e that exactly divides the lcm is assigned to the
/// first modulus carrying the full power e. Moduli are factored by trial
/// division, so this is meant for desk-scale inputs.
struct CoprimeFactorization {
  std::vector<std::int64_t> moduli;
  std::vector<std::int64_t> mu;
  BigInt lcm;
};

CoprimeFactorization coprime_factorization(std::span<const std::int64_t> moduli);

/// [x] = floor(x + 1/2), so that -1/2 <= x - [x] < 1/2.
std::int64_t round_half_up(double x);

/// Euclidean remainder: result in [0, n) for n > 0.
constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t n) {
  const std::int64_t q = a / n;
  return (a % n != 0 && ((a < 0) != (n < 0))) ? q - 1 : q;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t to_int64(const BigInt& v);

}  // namespace rrcrt
