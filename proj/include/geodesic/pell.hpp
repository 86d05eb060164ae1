#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>

namespace geodesic::pell {

using BigInt = boost::multiprecision::cpp_int;
using i64 = std::int64_t;
using u64 = std::uint64_t;

/// D > 0, not a square, D = 0 or 1 (mod 4).
bool is_discriminant(i64 D) noexcept;

/// Throws invalid_discriminant unless is_discriminant(D).
void require_discriminant(i64 D);

/// The j-th positive solution of t^2 - D u^2 = 4.
struct PellSolution {
  i64 D = 0;
  int j = 1;
  BigInt t;
  BigInt u;

  friend bool operator==(const PellSolution&, const PellSolution&) = default;
};

/// Minimal positive solution (j = 1), from the continued fraction of the
/// reduced quadratic irrational (b + sqrt D) / 2 over the order of
/// discriminant D. Sizes are unbounded.
PellSolution pell_fundamental(i64 D);

/// Fixed-width variant for callers that know the fundamental solution is
/// small. Returns nullopt once u would exceed max_u.
struct SmallPell {
  u64 t;
  u64 u;
};
std::optional<SmallPell> pell_fundamental_bounded(i64 D, u64 max_u);

/// (t_j + u_j sqrt D)/2 = ((t_1 + u_1 sqrt D)/2)^j.
PellSolution pell_power(const PellSolution& fund, int j);

/// Exact test of (t + u sqrt D)/2 < x.
bool epsilon_below(const PellSolution& sol, const BigInt& x);
bool epsilon_below(u64 t, u64 u, i64 D, u64 x);

/// log((t + sqrt(t^2 - 4)) / 2), i.e. j * log eps(D).
double log_epsilon(const PellSolution& sol);
double log_epsilon_from_trace(const BigInt& t);
double log_epsilon_from_trace(double t);

}  // namespace geodesic::pell
