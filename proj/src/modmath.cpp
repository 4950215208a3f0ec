#include "rrcrt/modmath.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace rrcrt {

namespace {

template <class Int>
struct Bezout {
  Int gcd;
  Int x;  // a*x + n*y = gcd
};

template <class Int>
Bezout<Int> extended_euclid(Int a, Int n) {
  Int old_r = a, r = n;
  Int old_s = 1, s = 0;
  while (r != 0) {
    Int q = old_r / r;
    Int tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  return {old_r, old_s};
}

std::map<std::int64_t, int> factor(std::int64_t n) {
  std::map<std::int64_t, int> out;
  for (std::int64_t p = 2; p <= n / p; ++p) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  if (n > 1) ++out[n];
  return out;
}

}  // namespace

GcdLcm gcd_lcm(std::span<const std::int64_t> values) {
  if (values.empty()) throw ArgumentError("gcd_lcm: empty list");
  GcdLcm out{0, BigInt(1)};
  for (const auto v : values) {
    if (v < 1) throw ArgumentError("gcd_lcm: values must be >= 1, got " + std::to_string(v));
    out.gcd = std::gcd(out.gcd, v);
    const BigInt bv(v);
    out.lcm = out.lcm / boost::multiprecision::gcd(out.lcm, bv) * bv;
  }
  return out;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t n) {
  if (n < 1) throw ArgumentError("mod_inverse: modulus must be >= 1");
  if (n == 1) return 0;
  const auto [g, x] = extended_euclid<std::int64_t>(floor_mod(a, n), n);
  if (g != 1) {
    throw NoInverseError("mod_inverse: gcd(" + std::to_string(a) + ", " + std::to_string(n) +
                         ") = " + std::to_string(g));
  }
  return floor_mod(x, n);
}

BigInt mod_inverse(const BigInt& a, const BigInt& n) {
  if (n < 1) throw ArgumentError("mod_inverse: modulus must be >= 1");
  if (n == 1) return 0;
  BigInt a_red = a % n;
  if (a_red < 0) a_red += n;
  const auto [g, x] = extended_euclid<BigInt>(a_red, n);
  if (g != 1) throw NoInverseError("mod_inverse: arguments not coprime");
  BigInt r = x % n;
  if (r < 0) r += n;
  return r;
}

CoprimeFactorization coprime_factorization(std::span<const std::int64_t> moduli) {
  const auto gl = gcd_lcm(moduli);
  CoprimeFactorization out;
  out.moduli.assign(moduli.begin(), moduli.end());
  out.mu.assign(moduli.size(), 1);
  out.lcm = gl.lcm;

  // prime -> (max exponent, first index reaching it)
  std::map<std::int64_t, std::pair<int, std::size_t>> best;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    for (const auto& [p, e] : factor(moduli[i])) {
      auto it = best.find(p);
      if (it == best.end() || e > it->second.first) best[p] = {e, i};
    }
  }
  for (const auto& [p, entry] : best) {
    for (int k = 0; k < entry.first; ++k) {
      out.mu[entry.second] = checked_mul(out.mu[entry.second], p);
    }
  }
  return out;
}

std::int64_t round_half_up(double x) {
  if (!std::isfinite(x)) throw ArgumentError("round_half_up: non-finite input");
  const double f = std::floor(x);
  if (f < -9.2e18 || f > 9.2e18) throw OverflowError("round_half_up: result exceeds int64");
  // x - f is exact here, unlike x + 0.5 which can round up for x just below a half.
  const auto base = static_cast<std::int64_t>(f);
  return (x - f >= 0.5) ? base + 1 : base;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int64 addition overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int64 multiplication overflow");
  return r;
}

std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw OverflowError("value does not fit in int64");
  }
  return v.convert_to<std::int64_t>();
}

}  // namespace rrcrt
