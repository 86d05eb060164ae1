#include "geodesic/numtheory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "geodesic/error.hpp"

namespace geodesic::nt {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::string to_string(i128 v) {
  if (v < 0) return "-" + to_string(static_cast<u128>(-v));
  return to_string(static_cast<u128>(v));
}

u128 Factorization::value() const {
  u128 out = 1;
  for (const auto& [p, e] : factors)
    for (int i = 0; i < e; ++i) out *= p;
  return out;
}

// ---------------------------------------------------------------------------
// Sieve

FactorSieve::FactorSieve(u64 limit) : limit_(std::max<u64>(limit, 3)) {
  if (limit_ >= (u64{1} << 32))
    throw Error(errc::domain_error, "factor sieve limit must be below 2^32");
  spf_.assign((limit_ + 1) / 2, 0);
  const u64 root = isqrt(limit_);
  for (u64 p = 3; p <= root; p += 2) {
    if (spf_[(p - 1) / 2] != 0) continue;
    for (u64 m = p * p; m <= limit_; m += 2 * p)
      if (spf_[(m - 1) / 2] == 0) spf_[(m - 1) / 2] = static_cast<std::uint16_t>(p);
  }
  const u64 prime_cap = std::min<u64>(limit_, 65535);
  for (u64 p = 3; p <= prime_cap; p += 2)
    if (spf_[(p - 1) / 2] == 0) small_primes_.push_back(static_cast<std::uint32_t>(p));
}

u64 FactorSieve::smallest_factor(u64 n) const {
  if (n % 2 == 0) return 2;
  const std::uint16_t f = spf_[(n - 1) / 2];
  return f == 0 ? n : f;
}

// ---------------------------------------------------------------------------
// Modular arithmetic helpers for Miller-Rabin / rho

namespace {

u128 mulmod(u128 a, u128 b, u128 m) {
  if (m <= (u128{1} << 64)) return (a % m) * (b % m) % m;
  a %= m;
  b %= m;
  u128 r = 0;
  while (b > 0) {
    if (b & 1) {
      r = (r >= m - a) ? r - (m - a) : r + a;
    }
    a = (a >= m - a) ? a - (m - a) : a + a;
    b >>= 1;
  }
  return r;
}

u128 powmod128(u128 base, u128 exp, u128 mod) {
  u128 r = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) r = mulmod(r, base, mod);
    base = mulmod(base, base, mod);
    exp >>= 1;
  }
  return r;
}

bool miller_rabin(u128 n, u64 a) {
  if (a % n == 0) return true;
  u128 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  u128 x = powmod128(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

u128 gcd128(u128 a, u128 b) {
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Brent's variant; n odd composite.
u128 pollard_rho(u128 n) {
  for (u128 c = 1;; ++c) {
    u128 y = 2, x = 2, g = 1, q = 1, ys = 2;
    const u64 m = 128;
    u64 r = 1;
    auto f = [&](u128 v) { return (mulmod(v, v, n) + c) % n; };
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd128(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd128(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

}  // namespace

bool is_prime(u128 n) {
  if (n < 2) return false;
  static constexpr std::array<u64, 20> bases = {2,  3,  5,  7,  11, 13, 17,
                                                19, 23, 29, 31, 37, 41, 43,
                                                47, 53, 59, 61, 67, 71};
  for (u64 p : bases) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // The first 12 bases are deterministic below 3.3e24; the rest are extra
  // rounds for the range up to 2^96.
  const std::size_t rounds = n < (u128{1} << 64) ? 12 : bases.size();
  for (std::size_t i = 0; i < rounds; ++i)
    if (!miller_rabin(n, bases[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Factorizer

Factorizer::Factorizer(u64 sieve_limit) : sieve_(sieve_limit) {}

void Factorizer::split(u128 n, std::vector<u128>& primes) const {
  if (n == 1) return;
  if (n <= sieve_.limit()) {
    u64 m = static_cast<u64>(n);
    while (m > 1) {
      u64 p = sieve_.smallest_factor(m);
      primes.push_back(p);
      m /= p;
    }
    return;
  }
  if (is_prime(n)) {
    primes.push_back(n);
    return;
  }
  const u128 d = pollard_rho(n);
  split(d, primes);
  split(n / d, primes);
}

void Factorizer::append_factors(u64 n, std::vector<PrimePower>& out) const {
  if (n <= 1) return;
  int e = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++e;
  }
  if (e > 0) out.push_back({2, e});
  if (n <= sieve_.limit()) {
    while (n > 1) {
      const u64 p = sieve_.smallest_factor(n);
      e = 0;
      do {
        n /= p;
        ++e;
      } while (n % p == 0);
      out.push_back({p, e});
    }
    return;
  }
  for (std::uint32_t p : sieve_.small_primes()) {
    if (p > 1024 || u64{p} * p > n) break;
    if (n % p != 0) continue;
    e = 0;
    do {
      n /= p;
      ++e;
    } while (n % p == 0);
    out.push_back({p, e});
    if (n <= sieve_.limit()) {
      append_factors(n, out);
      return;
    }
  }
  if (n == 1) return;
  std::vector<u128> primes;
  split(n, primes);
  std::sort(primes.begin(), primes.end());
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    out.push_back({primes[i], static_cast<int>(j - i)});
    i = j;
  }
}

Factorization Factorizer::factorize(u128 n) const {
  if (n == 0) throw Error(errc::domain_error, "factorize(0)");
  Factorization f;
  f.n = n;
  std::vector<PrimePower> raw;
  if (n <= ~u64{0}) {
    append_factors(static_cast<u64>(n), raw);
  } else {
    u128 m = n;
    if (const int e = valuation(m, 2); e > 0) {
      m >>= e;
      raw.push_back({2, e});
    }
    for (std::uint32_t p : sieve_.small_primes()) {
      if (static_cast<u128>(p) * p > m) break;
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      if (e > 0) raw.push_back({p, e});
    }
    if (m <= ~u64{0}) {
      append_factors(static_cast<u64>(m), raw);
    } else {
      std::vector<u128> primes;
      split(m, primes);
      for (u128 p : primes) raw.push_back({p, 1});
    }
  }
  f.factors = normalize_factors(std::move(raw));
  return f;
}

std::vector<PrimePower> normalize_factors(std::vector<PrimePower> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const PrimePower& a, const PrimePower& b) { return a.p < b.p; });
  std::vector<PrimePower> out;
  for (const auto& pe : raw) {
    if (!out.empty() && out.back().p == pe.p)
      out.back().e += pe.e;
    else
      out.push_back(pe);
  }
  return out;
}

const Factorizer& default_factorizer() {
  static const Factorizer instance;
  return instance;
}

Factorization factorize(u128 n) { return default_factorizer().factorize(n); }

// ---------------------------------------------------------------------------
// Elementary helpers

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

u128 isqrt(u128 n) {
  if (n <= ~u64{0}) return isqrt(static_cast<u64>(n));
  u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_square(u64 n) {
  const u64 r = isqrt(n);
  return r * r == n;
}

u64 gcd(u64 a, u64 b) {
  while (b != 0) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

u64 powmod(u64 base, u64 exp, u64 mod) {
  return static_cast<u64>(powmod128(base, exp, mod));
}

u64 ipow(u64 base, int exp) {
  u64 r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

int valuation(u128 n, u64 p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

void for_each_divisor(std::span<const PrimePower> factors,
                      const std::function<void(u128)>& fn) {
  if (factors.empty()) {
    fn(1);
    return;
  }
  const auto& [p, e] = factors.front();
  auto rest = factors.subspan(1);
  u128 pk = 1;
  for (int k = 0; k <= e; ++k, pk *= p)
    for_each_divisor(rest, [&](u128 d) { fn(d * pk); });
}

std::vector<u64> square_divisors(const Factorization& f) {
  std::vector<u64> out{1};
  for (const auto& [p, e] : f.factors) {
    const std::size_t base = out.size();
    u64 pk = 1;
    for (int k = 1; k <= e / 2; ++k) {
      pk *= static_cast<u64>(p);
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<u64> square_divisors(u128 n) { return square_divisors(factorize(n)); }

SquarefreeDecomposition squarefree_core(u128 n) {
  SquarefreeDecomposition out{1, 1};
  for (const auto& [p, e] : factorize(n).factors) {
    if (e % 2 == 1) out.core *= p;
    for (int i = 0; i < e / 2; ++i) out.cofactor *= p;
  }
  return out;
}

bool is_squarefree(u64 n) {
  for (const auto& [p, e] : factorize(n).factors)
    if (e > 1) return false;
  return true;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) throw Error(errc::domain_error, "kronecker symbol with n = 0");
  int sign = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) sign = -sign;
  }
  // (a/2) factors
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v > 0) {
    if (a % 2 == 0) return 0;
    const i64 r = ((a % 8) + 8) % 8;
    if ((v & 1) && (r == 3 || r == 5)) sign = -sign;
  }
  // Jacobi symbol (a/n), n odd positive
  i64 m = a % n;
  if (m < 0) m += n;
  i64 b = n;
  while (m != 0) {
    while (m % 2 == 0) {
      m /= 2;
      const i64 r = b % 8;
      if (r == 3 || r == 5) sign = -sign;
    }
    std::swap(m, b);
    if (m % 4 == 3 && b % 4 == 3) sign = -sign;
    m %= b;
  }
  return b == 1 ? sign : 0;
}

// ---------------------------------------------------------------------------
// Square roots modulo prime powers

namespace {

// Root of a unit a modulo an odd prime p (Tonelli-Shanks).
std::vector<u64> sqrt_unit_odd(u64 a, u64 p) {
  a %= p;
  if (powmod(a, (p - 1) / 2, p) != 1) return {};
  u64 root;
  if (p % 4 == 3) {
    root = powmod(a, (p + 1) / 4, p);
  } else {
    u64 q = p - 1;
    int s = 0;
    while (q % 2 == 0) {
      q /= 2;
      ++s;
    }
    u64 z = 2;
    while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
    u64 c = powmod(z, q, p);
    u64 x = powmod(a, (q + 1) / 2, p);
    u64 t = powmod(a, q, p);
    int m = s;
    while (t != 1) {
      int i = 0;
      u64 tt = t;
      while (tt != 1) {
        tt = static_cast<u64>(u128{tt} * tt % p);
        ++i;
      }
      u64 b = c;
      for (int j = 0; j < m - i - 1; ++j) b = static_cast<u64>(u128{b} * b % p);
      x = static_cast<u64>(u128{x} * b % p);
      c = static_cast<u64>(u128{b} * b % p);
      t = static_cast<u64>(u128{t} * c % p);
      m = i;
    }
    root = x;
  }
  return {root};
}

// Hensel lift of a simple root s of x^2 - a from p^k to p^r, p odd.
u64 hensel_lift_odd(u64 s, i64 a, u64 p, int r) {
  u64 mod = p;
  for (int k = 1; k < r; ++k) {
    const u64 next = mod * p;
    const i128 amod = ((static_cast<i128>(a) % next) + next) % next;
    // s' = s - (s^2 - a) / (2s) mod p^{k+1}
    const i128 f = (static_cast<i128>(s) * s - amod) % static_cast<i128>(next);
    // f divisible by mod; solve (f/mod) + 2 s t = 0 mod p
    const i64 fq = static_cast<i64>(((f / static_cast<i128>(mod)) % static_cast<i128>(p) + p) % p);
    const u64 inv2s = powmod((2 * s) % p, p - 2, p);
    const u64 t = static_cast<u64>((u128(p - fq) % p) * inv2s % p);
    s = (s + t * mod) % next;
    mod = next;
  }
  return s;
}

std::vector<u64> sqrt_unit(i64 a, u64 p, int r) {
  const u64 pr = ipow(p, r);
  const u64 am = static_cast<u64>(((static_cast<i128>(a) % pr) + pr) % pr);
  std::vector<u64> out;
  if (p == 2) {
    if (r == 1) return {1};
    if (r == 2) {
      if (am % 4 != 1) return {};
      return {1, 3};
    }
    if (am % 8 != 1) return {};
    // grow a root bit by bit: s^2 = a mod 2^{k+1}
    u64 s = 1;
    for (int k = 3; k < r; ++k) {
      const u64 mod = u64{1} << (k + 1);
      if ((static_cast<u128>(s) * s) % mod != am % mod) s += u64{1} << (k - 1);
    }
    const u64 half = pr / 2;
    out = {s % pr, (pr - s) % pr, (s + half) % pr, (pr - s + half) % pr};
  } else {
    auto base = sqrt_unit_odd(am % p, p);
    if (base.empty()) return {};
    const u64 s = hensel_lift_odd(base.front(), static_cast<i64>(am), p, r);
    out = {s, (pr - s) % pr};
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<u64> sqrt_mod_prime_power(i64 a, u64 p, int r) {
  if (r < 1) throw Error(errc::domain_error, "sqrt_mod_prime_power needs r >= 1");
  const u64 pr = ipow(p, r);
  u64 am = static_cast<u64>(((static_cast<i128>(a) % pr) + pr) % pr);
  std::vector<u64> out;
  if (am == 0) {
    // s = p^ceil(r/2) * k
    const u64 step = ipow(p, (r + 1) / 2);
    for (u64 s = 0; s < pr; s += step) out.push_back(s);
    return out;
  }
  const int v = valuation(am, p);
  if (v % 2 == 1) return {};
  const int e = v / 2;
  const u64 w = am / ipow(p, v);
  const int rr = r - 2 * e;  // roots of w modulo p^rr
  const auto base = sqrt_unit(static_cast<i64>(w), p, rr);
  const u64 pe = ipow(p, e);
  const u64 prr = ipow(p, rr);
  for (u64 s0 : base)
    for (u64 i = 0; i < pe; ++i) out.push_back(pe * (s0 + prr * i) % pr);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace geodesic::nt
