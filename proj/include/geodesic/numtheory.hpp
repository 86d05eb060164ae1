#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace geodesic::nt {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

std::string to_string(u128 v);
std::string to_string(i128 v);

struct PrimePower {
  u128 p;
  int e;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime decomposition of n; primes strictly increasing, exponents >= 1.
struct Factorization {
  u128 n = 1;
  std::vector<PrimePower> factors;

  u128 value() const;  // recomposes the product
  friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// Smallest-prime-factor table over odd numbers up to a fixed limit.
///
/// Stores 16-bit entries (composites below 2^32 always have a factor below
/// 2^16) for odd n only, so a limit of L costs about L bytes. Zero marks a
/// prime. Immutable after construction.
class FactorSieve {
 public:
  explicit FactorSieve(u64 limit);

  u64 limit() const noexcept { return limit_; }
  bool covers(u64 n) const noexcept { return n <= limit_; }

  /// Smallest prime factor of n, for 2 <= n <= limit().
  u64 smallest_factor(u64 n) const;

  /// Odd primes up to min(limit, 2^16), in increasing order.
  std::span<const std::uint32_t> small_primes() const noexcept {
    return small_primes_;
  }

 private:
  u64 limit_;
  std::vector<std::uint16_t> spf_;  // index (n-1)/2 for odd n
  std::vector<std::uint32_t> small_primes_;
};

/// Factorization engine: sieve lookups below the sieve limit, trial division
/// by the sieve's primes, then Miller-Rabin and Pollard rho for what remains.
class Factorizer {
 public:
  explicit Factorizer(u64 sieve_limit = u64{1} << 20);

  const FactorSieve& sieve() const noexcept { return sieve_; }

  Factorization factorize(u128 n) const;

  /// Appends (p, e) pairs of n to out without sorting or merging. Cheap path
  /// used by hot loops that merge factor lists themselves.
  void append_factors(u64 n, std::vector<PrimePower>& out) const;

 private:
  void split(u128 n, std::vector<u128>& primes) const;

  FactorSieve sieve_;
};

/// Process-wide factorizer with the default 2^20 sieve, built on first use.
const Factorizer& default_factorizer();

Factorization factorize(u128 n);

/// Sorts and merges raw (p, e) pairs into a canonical factor list.
std::vector<PrimePower> normalize_factors(std::vector<PrimePower> raw);

bool is_prime(u128 n);

u64 isqrt(u64 n);
u128 isqrt(u128 n);
bool is_square(u64 n);

u64 gcd(u64 a, u64 b);
u64 powmod(u64 base, u64 exp, u64 mod);

/// p-adic valuation; n must be nonzero.
int valuation(u128 n, u64 p);

/// Ascending list of u >= 1 with u^2 | n.
std::vector<u64> square_divisors(u128 n);
std::vector<u64> square_divisors(const Factorization& f);

/// Calls fn(d) for every positive divisor d of the factored number, in no
/// particular order.
void for_each_divisor(std::span<const PrimePower> factors,
                      const std::function<void(u128)>& fn);

struct SquarefreeDecomposition {
  u128 core;
  u128 cofactor;
  friend bool operator==(const SquarefreeDecomposition&,
                         const SquarefreeDecomposition&) = default;
};

/// n = core * cofactor^2 with core square-free.
SquarefreeDecomposition squarefree_core(u128 n);
bool is_squarefree(u64 n);

/// Kronecker symbol (a/n); n != 0.
int kronecker(i64 a, i64 n);

/// All s in [0, p^r) with s^2 = a (mod p^r), ascending. p must be prime.
std::vector<u64> sqrt_mod_prime_power(i64 a, u64 p, int r);

u64 ipow(u64 base, int exp);

}  // namespace geodesic::nt
