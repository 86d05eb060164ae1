#include "geodesic/qforms.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "geodesic/error.hpp"

namespace geodesic::qf {

namespace {

i64 isqrt_i(i64 D) { return static_cast<i64>(nt::isqrt(static_cast<nt::u64>(D))); }

i64 floor_mod(i64 a, i64 m) {
  const i64 r = a % m;
  return r < 0 ? r + m : r;
}

// rho with r in (sqrt D - 2|c|, sqrt D); s = floor(sqrt D).
QuadraticForm rho(const QuadraticForm& f, i64 D, i64 s) {
  const i64 two_c = 2 * (f.c < 0 ? -f.c : f.c);
  const i64 r = s - floor_mod(s + f.b, two_c);
  return {f.c, r, (r * r - D) / (4 * f.c)};
}

// rho with the (-|c|, |c|] window, used while |c| > sqrt D.
QuadraticForm rho_normalizing(const QuadraticForm& f, i64 D, i64 s) {
  const i64 abs_c = f.c < 0 ? -f.c : f.c;
  if (abs_c <= s) return rho(f, D, s);
  i64 r = floor_mod(-f.b, 2 * abs_c);
  if (r > abs_c) r -= 2 * abs_c;
  return {f.c, r, (r * r - D) / (4 * f.c)};
}

bool reduced_with(const QuadraticForm& f, i64 s) {
  const i64 abs_a = f.a < 0 ? -f.a : f.a;
  return f.b > 0 && f.b <= s && 2 * abs_a + f.b > s && 2 * abs_a - f.b <= s;
}

// Reduced forms satisfy 0 < b, |a| < sqrt D < 2^31 for the supported range.
std::uint64_t key_of(const QuadraticForm& f) {
  return (static_cast<std::uint64_t>(f.b) << 32) |
         static_cast<std::uint32_t>(static_cast<std::int32_t>(f.a));
}

QuadraticForm form_of(std::uint64_t key, i64 D) {
  const i64 b = static_cast<i64>(key >> 32);
  const i64 a = static_cast<std::int32_t>(static_cast<std::uint32_t>(key & 0xffffffffu));
  return {a, b, (b * b - D) / (4 * a)};
}

void require_form(const QuadraticForm& f) {
  const i64 D = f.discriminant();
  if (D <= 0 || nt::is_square(static_cast<nt::u64>(D)))
    throw Error(errc::invalid_discriminant,
                "form [" + std::to_string(f.a) + "," + std::to_string(f.b) + "," +
                    std::to_string(f.c) + "] is not indefinite");
}

constexpr i64 kMaxClassNumberD = i64{1} << 62;

}  // namespace

Discriminant make_discriminant(i64 D) {
  pell::require_discriminant(D);
  const auto sf = nt::squarefree_core(static_cast<nt::u128>(D));
  const i64 core = static_cast<i64>(sf.core);
  return Discriminant{D, core % 4 == 1 ? D : D / 4, core};
}

bool is_fundamental(const Discriminant& disc) {
  if (disc.D % 4 == 1) return nt::is_squarefree(static_cast<nt::u64>(disc.D));
  const i64 m = disc.D / 4;
  return (m % 4 == 2 || m % 4 == 3) && nt::is_squarefree(static_cast<nt::u64>(m));
}

QuadraticForm reduce_step(const QuadraticForm& f) {
  require_form(f);
  const i64 D = f.discriminant();
  return rho(f, D, isqrt_i(D));
}

bool is_reduced(const QuadraticForm& f) {
  const i64 D = f.discriminant();
  if (D <= 0) return false;
  return reduced_with(f, isqrt_i(D));
}

QuadraticForm reduce(const QuadraticForm& f) {
  require_form(f);
  const i64 D = f.discriminant();
  const i64 s = isqrt_i(D);
  QuadraticForm g = f;
  for (int guard = 0; !reduced_with(g, s); ++guard) {
    if (guard > 100000) throw Error(errc::domain_error, "reduction did not terminate");
    g = rho_normalizing(g, D, s);
  }
  return g;
}

QuadraticForm cycle_representative(const QuadraticForm& reduced) {
  const i64 D = reduced.discriminant();
  const i64 s = isqrt_i(D);
  QuadraticForm best = reduced;
  for (QuadraticForm g = rho(reduced, D, s); !(g == reduced); g = rho(g, D, s))
    best = std::min(best, g);
  return best;
}

std::vector<QuadraticForm> reduced_forms(const Discriminant& disc) {
  ClassNumberEngine engine(nt::default_factorizer());
  std::vector<QuadraticForm> out;
  engine.for_each_reduced(disc.D, [&](const QuadraticForm& f) {
    out.push_back(f);
    return true;
  });
  std::sort(out.begin(), out.end());
  return out;
}

int class_number(const Discriminant& disc) {
  thread_local ClassNumberEngine engine(nt::default_factorizer());
  return engine.class_number(disc.D);
}

// ---------------------------------------------------------------------------

ClassNumberEngine::ClassNumberEngine(const nt::Factorizer& factorizer)
    : factorizer_(&factorizer) {}

int ClassNumberEngine::class_number(i64 D) {
  pell::require_discriminant(D);
  if (D >= kMaxClassNumberD) throw Error(errc::overflow, "class number for D >= 2^62");
  keys_.clear();
  for_each_reduced(D, [&](const QuadraticForm& f) {
    keys_.push_back(key_of(f));
    return true;
  });
  std::sort(keys_.begin(), keys_.end());
  seen_.assign(keys_.size(), 0);
  const i64 s = isqrt_i(D);
  int cycles = 0;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (seen_[i]) continue;
    ++cycles;
    QuadraticForm f = form_of(keys_[i], D);
    std::size_t idx = i;
    do {
      seen_[idx] = 1;
      f = rho(f, D, s);
      idx = static_cast<std::size_t>(
          std::lower_bound(keys_.begin(), keys_.end(), key_of(f)) - keys_.begin());
    } while (idx != i);
  }
  return cycles;
}

bool ClassNumberEngine::class_number_is_one(i64 D) {
  pell::require_discriminant(D);
  if (D >= kMaxClassNumberD) throw Error(errc::overflow, "class number for D >= 2^62");
  const i64 s = isqrt_i(D);
  i64 b0 = s;
  if ((b0 - D) % 2 != 0) --b0;
  const QuadraticForm principal{1, b0, (b0 * b0 - D) / 4};
  std::vector<std::uint64_t> cycle;
  QuadraticForm f = principal;
  do {
    cycle.push_back(key_of(f));
    f = rho(f, D, s);
  } while (!(f == principal));
  std::sort(cycle.begin(), cycle.end());
  bool outside = false;
  for_each_reduced(D, [&](const QuadraticForm& g) {
    outside = !std::binary_search(cycle.begin(), cycle.end(), key_of(g));
    return !outside;
  });
  return !outside;
}

// ---------------------------------------------------------------------------
// Matrices

Matrix2 Matrix2::operator*(const Matrix2& o) const {
  return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
          m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
}

Matrix2 Matrix2::inverse() const { return {m22, -m12, -m21, m11}; }

Matrix2 Matrix2::pow(int j) const {
  Matrix2 out{1, 0, 0, 1};
  for (int k = 0; k < j; ++k) out = out * *this;
  return out;
}

HyperbolicMatrix make_hyperbolic(const Matrix2& g) {
  if (g.det() != 1) throw Error(errc::non_hyperbolic, "determinant is not 1");
  BigInt t = g.trace();
  if (abs(t) <= 2) throw Error(errc::non_hyperbolic, "|trace| <= 2");
  BigInt u = gcd(gcd(abs(g.m12), abs(g.m11 - g.m22)), abs(g.m21));
  BigInt D = (t * t - 4) / (u * u);
  return {g, std::move(t), std::move(u), std::move(D)};
}

HyperbolicMatrix form_to_matrix(const QuadraticForm& f, const pell::PellSolution& fund) {
  const i64 D = f.discriminant();
  if (fund.D != D)
    throw Error(errc::mismatched_discriminant,
                "form has D=" + std::to_string(D) + ", solution has D=" + std::to_string(fund.D));
  const BigInt bu = fund.u * f.b;
  if ((fund.t + bu) % 2 != 0)
    throw Error(errc::mismatched_discriminant, "parity of t + b u is odd");
  Matrix2 g{(fund.t + bu) / 2, fund.u * f.a, -fund.u * f.c, (fund.t - bu) / 2};
  return make_hyperbolic(g);
}

QuadraticForm matrix_to_form(const Matrix2& gamma) {
  const HyperbolicMatrix h = make_hyperbolic(gamma);
  return {static_cast<i64>(gamma.m12 / h.u), static_cast<i64>((gamma.m11 - gamma.m22) / h.u),
          static_cast<i64>(-gamma.m21 / h.u)};
}

// ---------------------------------------------------------------------------

int class_count_oracle(const Discriminant& disc, i64 bound) {
  const i64 D = disc.D;
  std::set<QuadraticForm> classes;
  for (i64 a = -bound; a <= bound; ++a) {
    if (a == 0) continue;
    for (i64 b = -bound; b <= bound; ++b) {
      const i64 num = b * b - D;
      if (num % (4 * a) != 0) continue;
      const i64 c = num / (4 * a);
      if (c < -bound || c > bound) continue;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      classes.insert(cycle_representative(reduce({a, b, c})));
    }
  }
  return static_cast<int>(classes.size());
}

}  // namespace geodesic::qf
