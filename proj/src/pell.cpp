#include "geodesic/pell.hpp"

#include <cmath>
#include <string>

#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"

namespace geodesic::pell {

namespace {

using nt::u128;

// One period of the continued fraction of (b + sqrt D)/2, b the largest
// integer below sqrt D with b = D (mod 2). The state (P, Q) starts at (b, 2)
// and returns there after one period; q_{l-1}, q_{l-2} are the last two
// convergent denominators. The unit q_{l-1} xi + q_{l-2} has norm (-1)^l.
template <class Int>
std::optional<std::pair<Int, Int>> cf_unit(i64 D, const std::optional<Int>& cap) {
  const i64 root = static_cast<i64>(nt::isqrt(static_cast<nt::u64>(D)));
  i64 b = root;
  if ((b - D) % 2 != 0) --b;
  const i64 P0 = b, Q0 = 2;
  i64 P = P0, Q = Q0;
  Int q_prev2 = 1, q_prev = 0;  // q_{-2}, q_{-1}
  int length = 0;
  do {
    const i64 a = (P + root) / Q;
    Int q = Int(a) * q_prev + q_prev2;
    if (cap && q > *cap) return std::nullopt;
    q_prev2 = q_prev;
    q_prev = q;
    P = a * Q - P;
    Q = (D - P * P) / Q;
    ++length;
  } while (P != P0 || Q != Q0);
  Int t = q_prev * Int(b) + 2 * q_prev2;
  Int u = q_prev;
  if (length % 2 == 1) {
    // norm -1: square the unit; t^2 - D u^2 = -4 gives t' = t^2 + 2
    Int u2 = t * u;
    if (cap && u2 > *cap) return std::nullopt;
    t = t * t + 2;
    u = u2;
  }
  return std::pair<Int, Int>{t, u};
}

}  // namespace

bool is_discriminant(i64 D) noexcept {
  if (D <= 0) return false;
  if (D % 4 != 0 && D % 4 != 1) return false;
  return !nt::is_square(static_cast<nt::u64>(D));
}

void require_discriminant(i64 D) {
  if (!is_discriminant(D))
    throw Error(errc::invalid_discriminant, std::to_string(D));
}

PellSolution pell_fundamental(i64 D) {
  require_discriminant(D);
  auto tu = cf_unit<BigInt>(D, std::nullopt);
  return PellSolution{D, 1, std::move(tu->first), std::move(tu->second)};
}

std::optional<SmallPell> pell_fundamental_bounded(i64 D, u64 max_u) {
  require_discriminant(D);
  auto tu = cf_unit<u128>(D, u128{max_u});
  if (!tu || tu->first > u128{~u64{0}}) return std::nullopt;
  return SmallPell{static_cast<u64>(tu->first), static_cast<u64>(tu->second)};
}

PellSolution pell_power(const PellSolution& fund, int j) {
  if (j < 1) throw Error(errc::domain_error, "pell_power needs j >= 1");
  PellSolution out = fund;
  const BigInt D = fund.D;
  for (int k = 1; k < j; ++k) {
    BigInt t = (fund.t * out.t + D * fund.u * out.u) / 2;
    BigInt u = (fund.t * out.u + fund.u * out.t) / 2;
    out.t = std::move(t);
    out.u = std::move(u);
  }
  out.j = j;
  return out;
}

bool epsilon_below(const PellSolution& sol, const BigInt& x) {
  const BigInt gap = 2 * x - sol.t;
  if (gap <= 0) return false;
  return sol.u * sol.u * sol.D < gap * gap;
}

bool epsilon_below(u64 t, u64 u, i64 D, u64 x) {
  const nt::i128 gap = 2 * static_cast<nt::i128>(x) - static_cast<nt::i128>(t);
  if (gap <= 0) return false;
  // u^2 D = t^2 - 4 may exceed 128 bits only for t >= 2^64, excluded by type
  const u128 lhs = static_cast<u128>(u) * u * static_cast<u128>(D);
  return lhs < static_cast<u128>(gap) * static_cast<u128>(gap);
}

double log_epsilon_from_trace(double t) {
  // eps = (t + sqrt((t-2)(t+2)))/2 avoids cancellation in t^2 - 4
  return std::log(t + std::sqrt((t - 2.0) * (t + 2.0))) - std::log(2.0);
}

double log_epsilon_from_trace(const BigInt& t) {
  if (t < (BigInt(1) << 52)) return log_epsilon_from_trace(t.convert_to<double>());
  // log eps = log t + log(1 - 1/(t eps)); the correction is below 2^-104
  const unsigned bits = boost::multiprecision::msb(t) + 1;
  const unsigned shift = bits > 60 ? bits - 60 : 0;
  const double mant = static_cast<double>(static_cast<BigInt>(t >> shift).convert_to<double>());
  return std::log(mant) + static_cast<double>(shift) * std::log(2.0);
}

double log_epsilon(const PellSolution& sol) { return log_epsilon_from_trace(sol.t); }

}  // namespace geodesic::pell
