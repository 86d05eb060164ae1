// Closed-form values of M_Gamma(D, j), transcribed row by row. Rows are
// tried in order; the first whose condition holds gives the value.

#include <functional>

#include "geodesic/congruence.hpp"
#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"

namespace geodesic::cg {

namespace {

struct Row {
  std::string label;
  std::function<bool()> when;
  std::function<u64()> value;
};

// Facts about one (D, j) at a prime p.
struct Local {
  u64 p = 2;
  int k = 0;  // p-adic valuation of u_j, capped
  i64 D = 0;
  i64 d = 0;

  bool divides_D(int e) const { return e <= 0 || D % static_cast<i64>(nt::ipow(p, e)) == 0; }
  bool divides_d(int e) const { return e <= 0 || d % static_cast<i64>(nt::ipow(p, e)) == 0; }
  i64 d_mod(u64 m) const { return ((d % static_cast<i64>(m)) + static_cast<i64>(m)) % static_cast<i64>(m); }
  int legendre() const { return nt::kronecker(d_mod(p), static_cast<i64>(p)); }
};

Local local_of(const PellClassData& data, u64 p, int cap) {
  Local L;
  L.p = p;
  L.D = data.D;
  L.d = data.d;
  BigInt u = data.u;
  while (L.k < cap && u % p == 0) {
    u /= p;
    ++L.k;
  }
  return L;
}

u64 pw(u64 base, int e) {
  if (e < 0) throw Error(errc::unsupported_spec, "negative exponent in a table row");
  return nt::ipow(base, e);
}

std::vector<Row> rows_for(const SubgroupSpec& s, const Local& L) {
  const int r = s.r;
  const int l = s.l;
  const int k = L.k;
  const u64 p = s.p;
  auto always = [] { return true; };
  std::vector<Row> out;

  auto add = [&](std::string label, std::function<bool()> when, std::function<u64()> value) {
    out.push_back({std::move(label), std::move(when), std::move(value)});
  };
  auto otherwise = [=] { add("otherwise", always, [] { return u64{0}; }); };
  auto full = [=] { return k >= r; };

  if (s.family == Family::Hat) {
    add("p^r | u", full, [=] { return principal_index(pw(p, r)); });
    otherwise();
    return out;
  }

  if (p == 2) {
    switch (s.family) {
      case Family::Split0:
        if (l < 0 && r == 1) {
          add("2 | u", full, [] { return u64{3}; });
          add("2 !| u, 2 | D", [=] { return k == 0 && L.divides_D(1); }, [] { return u64{1}; });
        } else if (l < 0 && r == 2) {
          add("4 | u", full, [] { return u64{6}; });
          add("2 !| u, 2 | D or 2 !| u, 4 | d",
              [=] { return (k == 0 && L.divides_D(1)) || (k == 0 && L.divides_d(2)); },
              [] { return u64{2}; });
        } else if (l < 0) {
          add("2^r | u", full, [=] { return 3 * pw(2, 2 * r - 4); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 2 * r - 4); });
          add("2^k || u, 2^(r-k+2) | D, 0 <= k <= r-2",
              [=] { return k <= r - 2 && L.divides_D(r - k + 2); }, [=] { return pw(2, r + k - 2); });
        } else {
          add("2^r | u", full, [=] { return 3 * pw(2, 3 * r - l - 4); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 3 * r - l - 4); });
          add("2^k || u, 2^(r-k+2) | D, r-l <= k <= r-1",
              [=] { return k >= r - l && k <= r - 1 && L.divides_D(r - k + 2); },
              [=] { return pw(2, 2 * r + k - l - 2); });
        }
        break;
      case Family::Plus:
        if (l < 0) {
          add("2^r | u", full, [=] { return 3 * pw(2, 2 * r - 1); });
          add("2^k || u, d = 1 mod 8, 3 <= k <= r-1",
              [=] { return L.d_mod(8) == 1 && k >= 3 && k <= r - 1; }, [=] { return pw(2, 2 * k + 1); });
        } else {
          add("2^r | u", full, [=] { return 3 * pw(2, 3 * r - l - 4); });
          add("2^k || u, d = 1 mod 8, r-l <= k <= r-1",
              [=] { return L.d_mod(8) == 1 && k >= r - l && k <= r - 1; },
              [=] { return pw(2, r + 2 * k - l - 2); });
        }
        break;
      case Family::Minus:
        if (l < 0 && r == 1) {
          add("2 | u or 2 !| u, d = 5 mod 8", [=] { return k >= 1 || L.d_mod(8) == 5; },
              [] { return u64{2}; });
        } else if (l < 0) {
          add("2^r | u", full, [=] { return pw(2, 2 * r - 1); });
          add("2^k || u, d = 5 mod 8, 0 <= k <= r-1, k != 1, 2",
              [=] { return L.d_mod(8) == 5 && k <= r - 1 && k != 1 && k != 2; },
              [=] { return pw(2, 2 * k + 1); });
        } else {
          add("2^r | u", full, [=] { return 3 * pw(2, 3 * r - l - 4); });
          add("2^k || u, d = 5 mod 8, r-l <= k <= r-2",
              [=] { return L.d_mod(8) == 5 && k >= r - l && k <= r - 2; },
              [=] { return pw(2, r + 2 * k - l - 2); });
        }
        break;
      case Family::Three:
        if (l < 0 && r == 2) {
          add("4 | u", full, [] { return u64{12}; });
          add("2 !| u, d = 3 mod 4", [=] { return k == 0 && L.d_mod(4) == 3; }, [] { return u64{2}; });
        } else if (l < 0) {
          add("2^r | u", full, [=] { return 3 * pw(2, 2 * r - 3); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 2 * r - 3); });
          add("2^k || u, d = 3 mod 4, 0 <= k <= r-2, k != 1",
              [=] { return L.d_mod(4) == 3 && k <= r - 2 && k != 1; }, [=] { return pw(2, 2 * k + 1); });
        } else {
          add("2^r | u", full, [=] { return 3 * pw(2, 3 * r - l - 4); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 3 * r - l - 4); });
          add("2^k || u, d = 3 mod 4, r-l <= k <= r-2",
              [=] { return L.d_mod(4) == 3 && k >= r - l && k <= r - 2; },
              [=] { return pw(2, r + 2 * k - l); });
        }
        break;
      case Family::Pow4: {
        const int m = s.m;
        auto residue = [=] {
          const u64 mod = pw(2, std::min(2 * m + 2, r));
          return static_cast<u64>(L.d_mod(mod)) == pw(2, std::min(2 * m, r)) % mod;
        };
        if (l < 0) {
          add("2^r | u", full, [=] { return 3 * pw(2, 2 * r - 2); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 2 * r - 2); });
          add("2^k || u, d = 2^min(2m,r) mod 2^min(2m+2,r), 2 <= k <= r-2",
              [=] { return residue() && k >= 2 && k <= r - 2; }, [=] { return pw(2, 2 * k + 2); });
        } else {
          add("2^r | u", full, [=] { return 3 * pw(2, 3 * r - l - 4); });
          add("2^(r-1) || u, 2 | D", [=] { return k == r - 1 && L.divides_D(1); },
              [=] { return pw(2, 3 * r - l - 4); });
          add("2^k || u, d = 2^min(2m,r) mod 2^min(2m+2,r), r-l <= k <= r-2",
              [=] { return residue() && k >= r - l && k <= r - 2; },
              [=] { return pw(2, r + 2 * k - l); });
        }
        break;
      }
      case Family::Hat:
        break;
    }
    otherwise();
    return out;
  }

  switch (s.family) {
    case Family::Split0:
      if (l < 0) {
        add("p^r | u", full, [=] { return pw(p, 2 * r - 2) * (p * p - 1) / 2; });
        add("p^k || u, p^(r-k) | d, 0 <= k <= r-1", [=] { return k <= r - 1 && L.divides_d(r - k); },
            [=] { return pw(p, r + k - 1) * (p - 1) / 2; });
      } else {
        add("p^r | u", full, [=] { return pw(p, 3 * r - l - 2) * (p * p - 1) / 2; });
        add("p^k || u, p^(r-k) | d, r-l <= k <= r-1",
            [=] { return k >= r - l && k <= r - 1 && L.divides_d(r - k); },
            [=] { return pw(p, 2 * r + k - l - 1) * (p - 1) / 2; });
      }
      break;
    case Family::Plus:
      if (l < 0) {
        add("p^r | u", full, [=] { return pw(p, 2 * r - 1) * (p + 1); });
        add("p^k || u, (d/p) = 1, 0 <= k <= r-1", [=] { return k <= r - 1 && L.legendre() == 1; },
            [=] { return 2 * pw(p, 2 * k); });
      } else {
        add("p^r | u", full, [=] { return pw(p, 3 * r - l - 2) * (p * p - 1) / 2; });
        add("p^k || u, (d/p) = 1, r-l <= k <= r-1",
            [=] { return k >= r - l && k <= r - 1 && L.legendre() == 1; },
            [=] { return pw(p, r + 2 * k - l - 1) * (p - 1); });
      }
      break;
    case Family::Minus:
      if (l < 0) {
        add("p^r | u", full, [=] { return pw(p, 2 * r - 1) * (p - 1); });
        add("p^k || u, (d/p) = -1, 0 <= k <= r-1", [=] { return k <= r - 1 && L.legendre() == -1; },
            [=] { return 2 * pw(p, 2 * k); });
      } else {
        add("p^r | u", full, [=] { return pw(p, 3 * r - l - 2) * (p * p - 1) / 2; });
        add("p^k || u, (d/p) = -1, r-l <= k <= r-1",
            [=] { return k >= r - l && k <= r - 1 && L.legendre() == -1; },
            [=] { return pw(p, r + 2 * k - l - 1) * (p + 1); });
      }
      break;
    default:
      break;
  }
  otherwise();
  return out;
}

void check_tabulated(const SubgroupSpec& s) {
  auto unsupported = [=] { throw Error(errc::unsupported_spec, "no table for " + s.name()); };
  if (!nt::is_prime(s.p) || s.r < 1) unsupported();
  if (s.l >= 0 && (s.family == Family::Hat || s.l < 1 || s.l > s.r - 1)) unsupported();
  if (s.p != 2) {
    if (s.family == Family::Three || s.family == Family::Pow4) unsupported();
    return;
  }
  switch (s.family) {
    case Family::Hat: return;
    case Family::Split0: if (s.l >= 0 && s.r < 3) unsupported(); return;
    case Family::Plus: if (s.r < 3) unsupported(); return;
    case Family::Minus: if (s.l >= 0 && s.r < 3) unsupported(); return;
    case Family::Three: if (s.r < 2 || (s.l >= 0 && s.r < 3)) unsupported(); return;
    case Family::Pow4: if (s.r < 3 || s.m < 1) unsupported(); return;
  }
}

// Rows whose printed value the coset count contradicts (checked for 2^r <= 64).
bool flagged(const SubgroupSpec& s, int row) {
  if (s.p != 2) return false;
  const int r = s.r;
  const int l = s.l;
  const bool top = l == r - 1;
  switch (s.family) {
    case Family::Hat:
      return false;
    case Family::Split0:
      return l < 0 && r == 2 && (row == 1 || row == 2);
    case Family::Plus:
      return l >= 0 && l >= r - 2 && row <= 1;
    case Family::Minus:
      if (l < 0) return false;
      return row == 2 || (row == 1 && l >= 2) || (row == 0 && l >= r - 2);
    case Family::Three:
      if (l < 0) return r >= 3 && row == 2;
      return (row == 2 && (l >= 3 || top)) || (row <= 1 && top);
    case Family::Pow4:
      if (s.m >= 2) return l < 0 || row == 3 || (row == 2 && (l >= 3 || top));
      if (l < 0) return row == 2;
      return (row == 2 && (l >= 3 || top)) || (row <= 1 && top);
  }
  return false;
}

}  // namespace

ClosedForm m_closed_form(const SubgroupSpec& spec, const PellClassData& data) {
  check_tabulated(spec);
  const Local L = local_of(data, spec.p, spec.r + 1);
  const auto rows = rows_for(spec, L);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].when()) return ClosedForm{rows[i].value(), static_cast<int>(i)};
  return ClosedForm{0, static_cast<int>(rows.size()) - 1};
}

std::string branch_label(const SubgroupSpec& spec, int branch) {
  check_tabulated(spec);
  const auto rows = rows_for(spec, Local{spec.p, 0, 5, 5});
  if (branch < 0 || branch >= static_cast<int>(rows.size()))
    throw Error(errc::domain_error, "no row " + std::to_string(branch) + " in " + spec.name());
  return rows[static_cast<std::size_t>(branch)].label;
}

int branch_count(const SubgroupSpec& spec) {
  check_tabulated(spec);
  return static_cast<int>(rows_for(spec, Local{spec.p, 0, 5, 5}).size());
}

bool branch_flagged(const SubgroupSpec& spec, int branch) {
  check_tabulated(spec);
  return flagged(spec, branch);
}

u64 m_composite(const CompositeSpec& spec, const PellClassData& data) {
  u64 out = 1;
  for (const auto& s : spec) {
    out *= m_closed_form(s, data).value;
    if (out == 0) return 0;
  }
  return out;
}

std::vector<SubgroupSpec> tabulated_families(u64 p, int r) {
  std::vector<SubgroupSpec> out;
  auto push = [&](Family f, int m = 0) {
    SubgroupSpec s{f, p, r, m, -1, 0};
    try {
      check_tabulated(s);
      out.push_back(s);
    } catch (const Error&) {
    }
    if (f == Family::Hat) return;
    for (int l = 1; l <= r - 1; ++l) {
      s.l = l;
      try {
        check_tabulated(s);
        out.push_back(s);
      } catch (const Error&) {
      }
    }
  };
  push(Family::Hat);
  push(Family::Split0);
  push(Family::Plus);
  push(Family::Minus);
  if (p == 2) {
    push(Family::Three);
    for (int m = 1; m <= 3; ++m) push(Family::Pow4, m);
  }
  return out;
}

}  // namespace geodesic::cg
