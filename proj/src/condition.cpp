#include "geodesic/condition.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"

namespace geodesic::stats {

namespace {

[[noreturn]] void parse_fail(std::string_view text, const std::string& why) {
  throw Error(errc::parse_error, "condition '" + std::string(text) + "': " + why);
}

u64 parse_u64(std::string_view text, const std::string& s) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) parse_fail(text, "bad number " + s);
  return v;
}

Atom parse_atom(std::string_view whole, std::string atom) {
  std::erase_if(atom, [](unsigned char c) { return std::isspace(c); });
  static const std::regex divides_re(R"((\d+)(?:\^(\d+))?\|d)");
  static const std::regex residue_re(R"(\(d/(\d+)\)=([+-]?1))");
  std::smatch m;
  if (atom == "d%4==3") return Atom::three_mod_four();
  if (std::regex_match(atom, m, divides_re)) {
    const u64 p = parse_u64(whole, m[1].str());
    const u64 e = m[2].matched ? parse_u64(whole, m[2].str()) : 1;
    if (e < 1 || e > 40) parse_fail(whole, "exponent out of range in " + atom);
    return Atom::divides(p, static_cast<int>(e));
  }
  if (std::regex_match(atom, m, residue_re)) {
    const u64 p = parse_u64(whole, m[1].str());
    return Atom::residue(p, m[2].str() == "-1" ? -1 : 1);
  }
  parse_fail(whole, "unrecognized atom '" + atom + "'");
}

Rational pow2(int e) {
  return e >= 0 ? Rational(boost::multiprecision::cpp_int(1) << e)
                : Rational(1, boost::multiprecision::cpp_int(1) << -e);
}

Rational ppow(u64 p, int e) {
  boost::multiprecision::cpp_int v = 1;
  for (int i = 0; i < std::abs(e); ++i) v *= p;
  return e >= 0 ? Rational(v) : Rational(1, v);
}

}  // namespace

bool Atom::holds(i64 d) const {
  switch (kind) {
    case AtomKind::DividesD: {
      i64 q = d;
      for (int i = 0; i < m; ++i) {
        if (q % static_cast<i64>(p) != 0) return false;
        q /= static_cast<i64>(p);
      }
      return true;
    }
    case AtomKind::Residue:
      if (p == 2) return ((d % 8) + 8) % 8 == (sign > 0 ? 1 : 5);
      return nt::kronecker(d, static_cast<i64>(p)) == sign;
    case AtomKind::ThreeMod4:
      return ((d % 4) + 4) % 4 == 3;
  }
  return false;
}

std::string Atom::str() const {
  switch (kind) {
    case AtomKind::DividesD:
      return std::to_string(p) + (m > 1 ? "^" + std::to_string(m) : "") + "|d";
    case AtomKind::Residue:
      return "(d/" + std::to_string(p) + ")=" + (sign > 0 ? "1" : "-1");
    case AtomKind::ThreeMod4:
      return "d%4==3";
  }
  return {};
}

Condition::Condition(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (!nt::is_prime(a.p))
      throw Error(errc::unsupported_condition, a.str() + ": " + std::to_string(a.p) + " is not prime");
    if (a.kind == AtomKind::ThreeMod4 && a.p != 2)
      throw Error(errc::unsupported_condition, "d%4==3 is a condition at 2");
    if (a.kind == AtomKind::Residue && a.sign != 1 && a.sign != -1)
      throw Error(errc::unsupported_condition, "residue symbol must be 1 or -1");
    if (a.kind == AtomKind::DividesD && a.m < 1)
      throw Error(errc::unsupported_condition, "exponent must be at least 1");
    for (std::size_t k = 0; k < i; ++k)
      if (atoms_[k].p == a.p)
        throw Error(errc::unsupported_condition,
                    "two atoms on the prime " + std::to_string(a.p) + ": " + atoms_[k].str() + ", " + a.str());
  }
}

Condition Condition::parse(std::string_view text) {
  std::string s(text);
  static const std::regex sep_re(R"(\s+and\s+|,)");
  std::vector<Atom> atoms;
  for (std::sregex_token_iterator it(s.begin(), s.end(), sep_re, -1), end; it != end; ++it) {
    std::string piece = *it;
    if (std::all_of(piece.begin(), piece.end(), [](unsigned char c) { return std::isspace(c); }))
      parse_fail(text, "empty atom");
    atoms.push_back(parse_atom(text, piece));
  }
  if (atoms.empty()) parse_fail(text, "empty condition");
  return Condition(std::move(atoms));
}

bool Condition::holds(i64 d) const {
  return std::all_of(atoms_.begin(), atoms_.end(), [d](const Atom& a) { return a.holds(d); });
}

std::string Condition::str() const {
  if (atoms_.empty()) return "true";
  std::string out;
  for (const auto& a : atoms_) out += (out.empty() ? "" : " and ") + a.str();
  return out;
}

Rational mu_atom(const Atom& a) {
  const u64 p = a.p;
  const Rational p3m1 = ppow(p, 3) - 1;
  switch (a.kind) {
    case AtomKind::DividesD:
      if (p == 2) {
        switch (a.m) {
          case 1: return Rational(45, 112);
          case 2: return Rational(37, 112);
          case 3: return Rational(17, 56);
          case 4: return Rational(9, 56);
          default:
            return a.m % 2 == 1 ? 3 * pow2(3 - a.m) / 7 : pow2(5 - a.m) / 7;
        }
      }
      return 2 * ppow(p, 3 - a.m) / p3m1;
    case AtomKind::Residue:
      if (p == 2) return a.sign > 0 ? Rational(1, 224) : Rational(75, 224);
      return Rational(1, 2) - Rational(p * (a.sign > 0 ? p + 1 : p - 1)) / p3m1;
    case AtomKind::ThreeMod4:
      return Rational(29, 112);
  }
  return 0;
}

Rational mu_theoretical(const Condition& c) {
  Rational out = 1;
  for (const auto& a : c.atoms()) out *= mu_atom(a);
  return out;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

}  // namespace geodesic::stats
