#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace geodesic::stats {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using Rational = boost::multiprecision::cpp_rational;

enum class AtomKind { DividesD, Residue, ThreeMod4 };

/// One condition on the companion d at a single prime.
struct Atom {
  AtomKind kind = AtomKind::DividesD;
  u64 p = 2;
  int m = 1;     // DividesD: p^m | d
  int sign = 1;  // Residue: (d/p) = sign

  static Atom divides(u64 p, int m) { return Atom{AtomKind::DividesD, p, m, 1}; }
  static Atom residue(u64 p, int sign) { return Atom{AtomKind::Residue, p, 1, sign}; }
  static Atom three_mod_four() { return Atom{AtomKind::ThreeMod4, 2, 1, 1}; }

  /// (d/2) = 1 means d = 1 mod 8 and (d/2) = -1 means d = 5 mod 8.
  bool holds(i64 d) const;
  std::string str() const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Conjunction of atoms on pairwise distinct primes; empty means "always".
class Condition {
 public:
  Condition() = default;
  explicit Condition(std::vector<Atom> atoms);

  /// `p^m|d`, `p|d`, `(d/p)=1`, `(d/p)=-1`, `d%4==3`, joined by `and` or `,`.
  static Condition parse(std::string_view text);

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool holds(i64 d) const;
  std::string str() const;

 private:
  std::vector<Atom> atoms_;
};

/// Limiting density of one atom.
Rational mu_atom(const Atom& atom);

/// Product of the atom densities.
Rational mu_theoretical(const Condition& c);

double to_double(const Rational& q);
std::string to_string(const Rational& q);  // "a/b"

}  // namespace geodesic::stats
