#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

#include "geodesic/numtheory.hpp"
#include "geodesic/pell.hpp"

namespace geodesic::qf {

using i64 = std::int64_t;
using pell::BigInt;

/// Primitive form [a, b, c] = ax^2 + bxy + cy^2.
struct QuadraticForm {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;

  i64 discriminant() const { return b * b - 4 * a * c; }
  friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;
  friend auto operator<=>(const QuadraticForm&, const QuadraticForm&) = default;
};

/// Validated D with its companion d (D, or D/4 when the square-free core is
/// not 1 mod 4) and square-free core.
struct Discriminant {
  i64 D = 0;
  i64 d = 0;
  i64 core = 0;
  friend bool operator==(const Discriminant&, const Discriminant&) = default;
};

Discriminant make_discriminant(i64 D);

/// Fundamental discriminants: D = d with d square-free, or D = 4d.
bool is_fundamental(const Discriminant& disc);

/// The reduction operator rho: [a,b,c] -> [c, r, (r^2 - D)/(4c)] with
/// r = -b (mod 2|c|) and sqrt D - 2|c| < r < sqrt D.
QuadraticForm reduce_step(const QuadraticForm& f);

/// 0 < b < sqrt D and sqrt D - b < 2|a| < sqrt D + b.
bool is_reduced(const QuadraticForm& f);

/// Reduces an arbitrary indefinite form to an equivalent reduced one.
/// Large |c| uses the (-|c|, |c|] normalization so the coefficients shrink.
QuadraticForm reduce(const QuadraticForm& f);

/// Every reduced primitive form of discriminant D, sorted.
std::vector<QuadraticForm> reduced_forms(const Discriminant& disc);

/// Narrow class number: the number of rho-cycles among the reduced forms.
int class_number(const Discriminant& disc);

/// Reusable worker for the census hot loop. Holds scratch buffers, so one
/// instance per thread.
class ClassNumberEngine {
 public:
  explicit ClassNumberEngine(const nt::Factorizer& factorizer);

  int class_number(i64 D);

  /// h(D) == 1, decided by walking the principal cycle and stopping at the
  /// first reduced form outside it.
  bool class_number_is_one(i64 D);

  /// Calls fn(form) for each reduced form; fn returns false to stop early.
  /// b runs from the top of its range downwards.
  template <class Fn>
  void for_each_reduced(i64 D, Fn&& fn);

 private:
  const nt::Factorizer* factorizer_;
  std::vector<nt::PrimePower> factors_;
  std::vector<i64> divisors_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint8_t> seen_;
};

/// Element of SL2(Z), row-major.
struct Matrix2 {
  BigInt m11, m12, m21, m22;

  BigInt trace() const { return m11 + m22; }
  BigInt det() const { return m11 * m22 - m12 * m21; }
  Matrix2 operator*(const Matrix2& o) const;
  Matrix2 inverse() const;  // for det 1
  Matrix2 pow(int j) const;
  friend bool operator==(const Matrix2&, const Matrix2&) = default;
};

/// Hyperbolic element with the derived invariants t, u and D.
struct HyperbolicMatrix {
  Matrix2 gamma;
  BigInt t;
  BigInt u;
  BigInt D;
};

/// Validates det 1 and |trace| > 2, and computes t, u, D.
HyperbolicMatrix make_hyperbolic(const Matrix2& gamma);

/// [[(t+bu)/2, au], [-cu, (t-bu)/2]] for the fundamental solution (t, u).
HyperbolicMatrix form_to_matrix(const QuadraticForm& f, const pell::PellSolution& fund);

/// (g12/u) x^2 + ((g11 - g22)/u) xy - (g21/u) y^2.
QuadraticForm matrix_to_form(const Matrix2& gamma);

/// Counts classes among all primitive forms of discriminant D with
/// |a|, |b|, |c| <= bound, reducing each and comparing rho-cycles.
int class_count_oracle(const Discriminant& disc, i64 bound);

/// Key of the rho-cycle through a reduced form: its smallest member.
QuadraticForm cycle_representative(const QuadraticForm& reduced);

// ---------------------------------------------------------------------------

template <class Fn>
void ClassNumberEngine::for_each_reduced(i64 D, Fn&& fn) {
  const i64 s = static_cast<i64>(nt::isqrt(static_cast<nt::u64>(D)));
  i64 b = s;
  if ((b - D) % 2 != 0) --b;
  for (; b > 0; b -= 2) {
    const i64 N = (D - b * b) / 4;  // -ac
    factors_.clear();
    factorizer_->append_factors(static_cast<nt::u64>(N), factors_);
    divisors_.assign(1, 1);
    for (const auto& [p, e] : factors_) {
      const std::size_t base = divisors_.size();
      i64 pk = 1;
      for (int k = 1; k <= e; ++k) {
        pk *= static_cast<i64>(p);
        for (std::size_t i = 0; i < base; ++i) divisors_.push_back(divisors_[i] * pk);
      }
    }
    for (i64 m : divisors_) {
      // sqrt D - b < 2m  <=>  2m + b > s ;  2m < sqrt D + b  <=>  2m - b <= s
      if (2 * m + b <= s || 2 * m - b > s) continue;
      const i64 other = N / m;
      if (std::gcd(std::gcd(m, b), other) != 1) continue;
      if (!fn(QuadraticForm{m, b, -other})) return;
      if (!fn(QuadraticForm{-m, b, other})) return;
    }
  }
}

}  // namespace geodesic::qf
