#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrcrt/modmath.hpp"

namespace rrcrt {

class InconsistentRemainders : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Error-free CRT for general (not necessarily pairwise coprime) moduli.
///
/// Holds the coprime factorization mu of the moduli together with
/// M_j = lcm / mu_j and D_j = M_j^{-1} mod mu_j (D_j = 0 when mu_j = 1).
/// Immutable after construction.
class CrtSystem {
 public:
  explicit CrtSystem(std::vector<std::int64_t> moduli);

  const std::vector<std::int64_t>& moduli() const { return factorization_.moduli; }
  const CoprimeFactorization& factorization() const { return factorization_; }
  const BigInt& lcm() const { return factorization_.lcm; }
  const std::vector<BigInt>& M() const { return M_; }
  const std::vector<std::int64_t>& D() const { return D_; }
  std::size_t size() const { return factorization_.moduli.size(); }

 private:
  CoprimeFactorization factorization_;
  std::vector<BigInt> M_;
  std::vector<std::int64_t> D_;
};

std::vector<std::int64_t> remainders_of(const BigInt& N, const CrtSystem& system);

/// The unique N in [0, lcm) matching every congruence. Throws
/// InconsistentRemainders when two moduli disagree on a shared factor and
/// ArgumentError when a remainder is out of [0, m_i).
BigInt crt_reconstruct(std::span<const std::int64_t> remainders, const CrtSystem& system);

/// |sum r_j D_j M_j|_lcm without the consistency check. Equals
/// crt_reconstruct on consistent input; on inconsistent input it still
/// returns the value matching every remainder modulo its mu_j.
BigInt crt_formula(std::span<const std::int64_t> remainders, const CrtSystem& system);

}  // namespace rrcrt
