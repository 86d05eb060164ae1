#include <doctest.h>

#include <optional>

#include "geodesic/congruence.hpp"
#include "geodesic/census.hpp"
#include "geodesic/error.hpp"
#include "oracles.hpp"

using namespace geodesic::cg;

namespace {

// |SL2(Z/N)| by counting determinant-one matrices, divided by the scalars.
u64 psl2_order_by_count(u32 N) {
  u64 sl = 0;
  for (u32 a = 0; a < N; ++a)
    for (u32 b = 0; b < N; ++b)
      for (u32 c = 0; c < N; ++c)
        for (u32 d = 0; d < N; ++d)
          if ((u64{a} * d + u64{N} * N - u64{b} * c) % N == 1 % N) ++sl;
  u64 scalars = 0;
  for (u32 x = 0; x < N; ++x)
    if (u64{x} * x % N == 1 % N) ++scalars;
  return sl / scalars;
}

SubgroupSpec spec(Family f, u64 p, int r, int l = -1, int m = 0) { return SubgroupSpec{f, p, r, m, l, 0}; }

u64 brute_at(const GroupTable& G, const Subgroup& H, const PellClassData& d) {
  return induced_char_trace(G, H, g_of(d.D, d.t, d.u, G.modulus()));
}

}  // namespace

TEST_CASE("PSL2(Z/NZ) sizes") {
  CHECK(GroupTable(2).size() == 6);
  CHECK(GroupTable(4).size() == 24);
  CHECK(GroupTable(3).size() == 12);
  for (u32 N : {5u, 6u, 8u, 9u, 10u, 12u, 16u}) {
    INFO("N=", N);
    CHECK(GroupTable(N).size() == psl2_order_by_count(N));
    CHECK(principal_index(N) == GroupTable(N).size());
  }
  CHECK(principal_index(64) == 49152);
  CHECK_THROWS_AS(GroupTable(65), geodesic::Error);
  try {
    GroupTable g(128);
  } catch (const geodesic::Error& e) {
    CHECK(e.code() == geodesic::errc::modulus_too_large);
  }
}

TEST_CASE("group table is closed under product and inverse") {
  for (u32 N : {4u, 6u, 9u}) {
    const GroupTable G(N);
    const auto e = G.identity();
    for (std::size_t i = 0; i < G.size(); ++i) {
      REQUIRE(G[i].det() == 1 % N);
      REQUIRE(G.multiply(i, G.inverse(i)) == e);
      REQUIRE(G.multiply(e, i) == i);
      for (std::size_t j = 0; j < G.size(); j += 3) {
        const auto prod = G[i] * G[j];
        REQUIRE(G.index_of(prod) == G.multiply(i, j));
      }
    }
    // scalar multiples collapse to one element
    for (u32 alpha : square_roots_of_one(N)) {
      const MatModN m{N, 1, 1, 0, 1};
      const MatModN am{N, alpha, alpha, 0, alpha};
      REQUIRE(G.index_of(m) == G.index_of(am));
    }
  }
}

TEST_CASE("subgroup examples") {
  const GroupTable G2(2);
  const auto hat = build_subgroup(G2, spec(Family::Hat, 2, 1));
  CHECK(hat.order == 1);
  CHECK(CosetAction(G2, hat).index() == 6);
  const auto split = build_subgroup(G2, spec(Family::Split0, 2, 1));
  CHECK(split.order == 2);
  CHECK(CosetAction(G2, split).index() == 3);

  const GroupTable G3(3);
  const auto plus = build_subgroup(G3, spec(Family::Plus, 3, 1));
  CHECK(plus.order == 1);
  CHECK(CosetAction(G3, plus).index() == 12);
  const auto minus = build_subgroup(G3, spec(Family::Minus, 3, 1));
  CHECK(CosetAction(G3, minus).index() == 6);

  // subgroup axioms for every family we can build
  for (u32 N : {8u, 9u, 16u}) {
    const GroupTable G(N);
    const u64 p = N % 2 == 0 ? 2 : 3;
    const int r = N == 8 ? 3 : N == 16 ? 4 : 2;
    for (const auto& s : tabulated_families(p, r)) {
      INFO(s.name());
      const auto H = build_subgroup(G, s);
      REQUIRE(H.contains(G.identity()));
      std::size_t count = 0;
      for (std::size_t i = 0; i < G.size(); ++i) {
        if (!H.contains(i)) continue;
        ++count;
        REQUIRE(H.contains(G.inverse(i)));
        for (std::size_t j = 0; j < G.size(); ++j)
          if (H.contains(j)) REQUIRE(H.contains(G.multiply(i, j)));
      }
      REQUIRE(count == H.order);
      REQUIRE(G.size() % H.order == 0);
    }
  }
}

TEST_CASE("subgroup orders agree with the identity rows of the tables") {
  // p^(2r-1)(p+1) and p^(2r-1)(p-1) are the indices of the split and non-split tori
  for (u64 p : {3, 5}) {
    for (int r = 1; r <= 2; ++r) {
      const u32 N = static_cast<u32>(p == 3 ? (r == 1 ? 3 : 9) : (r == 1 ? 5 : 25));
      const GroupTable G(N);
      const u64 pr1 = r == 1 ? p : p * p * p;
      CHECK(CosetAction(G, build_subgroup(G, spec(Family::Plus, p, r))).index() == pr1 * (p + 1));
      CHECK(CosetAction(G, build_subgroup(G, spec(Family::Minus, p, r))).index() == pr1 * (p - 1));
    }
  }
}

TEST_CASE("g_of examples") {
  const auto g = g_of(5, 3, 1, 2);
  CHECK(g == MatModN{2, 0, 1, 1, 1});
  // eps(12) = 2 + sqrt 3, so (t, u) = (4, 1)
  const auto h = g_of(12, 4, 1, 3);
  CHECK(h == MatModN{3, 2, 0, 1, 2});
  CHECK_THROWS_AS(g_of(12, 4, 2, 3), geodesic::Error);
  for (const auto& r : geodesic::census::census(200, {.class_numbers = false}))
    for (u32 N : {2u, 7u, 12u, 64u}) REQUIRE(g_of(r.D, r.t, r.u, N).det() == 1 % N);
}

TEST_CASE("fixed-coset counts") {
  const GroupTable G2(2);
  const auto split = build_subgroup(G2, spec(Family::Split0, 2, 1));
  const CosetAction act(G2, split);
  CHECK(act.trace(G2.identity()) == 3);
  // an element of order 3 permutes the three cosets cyclically
  const auto w = G2.index_of(MatModN{2, 0, 1, 1, 1});
  CHECK(G2.multiply(w, G2.multiply(w, w)) == G2.identity());
  CHECK(act.trace(w) == 0);
  CHECK(induced_char_trace(G2, split, G2[w]) == 0);

  for (u32 N : {4u, 6u, 8u, 9u}) {
    const GroupTable G(N);
    std::vector<SubgroupSpec> specs;
    if (N == 6) {
      specs = {};
    } else {
      const u64 p = N % 2 == 0 ? 2 : 3;
      const int r = N == 4 ? 2 : N == 8 ? 3 : 2;
      specs = tabulated_families(p, r);
    }
    std::vector<Subgroup> groups;
    for (const auto& s : specs) groups.push_back(build_subgroup(G, s));
    if (N == 6) groups.push_back(build_subgroup(G, CompositeSpec{spec(Family::Split0, 2, 1), spec(Family::Minus, 3, 1)}));
    for (const auto& H : groups) {
      const CosetAction A(G, H);
      CHECK(A.trace(G.identity()) == A.index());
      CHECK(A.index() * H.order == G.size());
      u64 burnside = 0;
      for (std::size_t g = 0; g < G.size(); ++g) {
        burnside += A.trace(g);
        REQUIRE(A.trace(g) == induced_char_trace(G, H, G[g]));
      }
      CHECK(burnside == G.size());  // one orbit
      for (std::size_t g = 0; g < G.size(); g += 5)
        for (std::size_t x = 0; x < G.size(); x += 7)
          REQUIRE(A.trace(G.multiply(G.multiply(x, g), G.inverse(x))) == A.trace(g));
    }
  }
}

TEST_CASE("closed forms: table examples") {
  // Gamma-hat(3), 3 | u_j
  const auto d13 = pell_class_data(13, 1);  // (11, 3)
  CHECK(d13.u == 3);
  CHECK(m_closed_form(spec(Family::Hat, 3, 1), d13).value == 12);
  // Gamma(2;0), D = 12, u odd
  const auto d12 = pell_class_data(12, 1);  // (4, 1)
  CHECK(d12.u == 1);
  const auto d28 = pell_class_data(28, 1);  // (16, 3)
  CHECK(d28.u == 3);
  CHECK(m_closed_form(spec(Family::Split0, 2, 1), d28).value == 1);
  CHECK(m_closed_form(spec(Family::Split0, 2, 1), d12).value == 1);
  CHECK(m_closed_form(spec(Family::Split0, 2, 1), pell_class_data(8, 1)).value == 3);  // (6, 2)
  // Gamma(3;0), 3 !| u, 3 | d: D = 21 (5, 1)
  const auto d21 = pell_class_data(21, 1);
  CHECK(d21.u == 1);
  CHECK(m_closed_form(spec(Family::Split0, 3, 1), d21).value == 1);
  // Gamma(3;-), (d/3) = -1, 3 !| u: D = 5
  const auto d5 = pell_class_data(5, 1);
  CHECK(oracle::legendre(5, 3) == -1);
  CHECK(m_closed_form(spec(Family::Minus, 3, 1), d5).value == 2);
  CHECK(m_closed_form(spec(Family::Plus, 3, 1), d5).value == 0);

  CHECK(d5.delta == 1);
  CHECK(d12.delta == 0);
  CHECK(d13.d == 13);
  CHECK(pell_class_data(32, 1).d == 8);
  CHECK(pell_class_data(5, 2).u == 3);
  CHECK(pell_class_data(5, 2).j == 2);
}

TEST_CASE("closed forms agree with coset counts off the flagged rows") {
  std::vector<SubgroupSpec> all;
  for (int r = 1; r <= 4; ++r)
    for (const auto& s : tabulated_families(2, r)) all.push_back(s);
  for (u64 p : {3, 5})
    for (int r = 1; r <= 2; ++r)
      for (const auto& s : tabulated_families(p, r)) all.push_back(s);
  for (const auto& s : all) {
    INFO(s.name());
    const auto report = verify_m(s, sample_pairs(s, 200));
    CHECK(report.lines.size() >= 200);
    CHECK(report.disagreements == report.flagged_disagreements);
    if (s.p != 2) CHECK(report.disagreements == 0);
    const MEvaluator ev(s);
    for (const auto& line : report.lines) {
      const auto data = pell_class_data(line.D, line.j);
      REQUIRE(ev(data) == line.brute);
    }
  }
}

TEST_CASE("evaluated M equals the induced character everywhere") {
  for (const auto& s : tabulated_families(2, 3)) {
    const MEvaluator ev(s);
    const GroupTable G(8);
    const auto H = build_subgroup(G, s);
    for (i64 D = 5; D < 400; ++D) {
      if (!geodesic::pell::is_discriminant(D)) continue;
      for (int j = 1; j <= 3; ++j) {
        const auto data = pell_class_data(D, j);
        REQUIRE(ev(data) == brute_at(G, H, data));
      }
    }
  }
}

TEST_CASE("sample_pairs covers every reachable row round robin") {
  const auto s = spec(Family::Split0, 2, 1);
  const auto samples = sample_pairs(s, 90);
  CHECK(samples.size() == 90);
  std::vector<int> per_row(3);
  for (const auto& d : samples) ++per_row[static_cast<std::size_t>(m_closed_form(s, d).branch)];
  CHECK(per_row == std::vector<int>{30, 30, 30});
  const auto again = sample_pairs(s, 90);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(again[i].D == samples[i].D);
    CHECK(again[i].j == samples[i].j);
  }
}

TEST_CASE("product rule at composite levels") {
  // Gamma-hat(6): 6 | u gives 6 * 12 = 72
  const auto d = pell_class_data(5, 12);
  REQUIRE(d.u % 6 == 0);
  const CompositeSpec hat6{spec(Family::Hat, 2, 1), spec(Family::Hat, 3, 1)};
  CHECK(m_composite(hat6, d) == 72);
  CHECK(principal_index(6) == 72);
  // any factor zero
  CHECK(m_composite(hat6, pell_class_data(5, 1)) == 0);
  // Gamma(2;0) cap Gamma-hat(3): u odd, 2 | D, 3 | u
  const auto d28 = pell_class_data(28, 1);
  const CompositeSpec mixed{spec(Family::Split0, 2, 1), spec(Family::Hat, 3, 1)};
  CHECK(m_composite(mixed, d28) == 12);

  CHECK_THROWS_AS(build_subgroup(GroupTable(6), CompositeSpec{spec(Family::Hat, 2, 1), spec(Family::Hat, 2, 1)}),
                  geodesic::Error);
}

TEST_CASE("the induced character factors over primes at levels 6 and 12") {
  struct Case {
    u32 N;
    CompositeSpec parts;
  };
  const std::vector<Case> cases = {
      {6, {spec(Family::Split0, 2, 1), spec(Family::Split0, 3, 1)}},
      {6, {spec(Family::Minus, 2, 1), spec(Family::Plus, 3, 1)}},
      {6, {spec(Family::Hat, 2, 1), spec(Family::Minus, 3, 1)}},
      {12, {spec(Family::Split0, 2, 2), spec(Family::Minus, 3, 1)}},
      {12, {spec(Family::Three, 2, 2), spec(Family::Split0, 3, 1)}},
      {12, {spec(Family::Minus, 2, 2), spec(Family::Hat, 3, 1)}},
  };
  for (const auto& c : cases) {
    INFO(composite_name(c.parts));
    const GroupTable G(c.N);
    const auto H = build_subgroup(G, c.parts);
    std::vector<GroupTable> locals;
    std::vector<Subgroup> local_groups;
    for (const auto& s : c.parts) locals.emplace_back(static_cast<u32>(s.level()));
    for (std::size_t i = 0; i < c.parts.size(); ++i) local_groups.push_back(build_subgroup(locals[i], c.parts[i]));
    std::size_t checked = 0;
    for (const auto& data : sample_pairs(c.parts[0], 100)) {
      const u64 direct = brute_at(G, H, data);
      u64 product = 1;
      for (std::size_t i = 0; i < c.parts.size(); ++i) product *= brute_at(locals[i], local_groups[i], data);
      REQUIRE(direct == product);
      bool any_flag = false;
      for (const auto& s : c.parts) any_flag |= branch_flagged(s, m_closed_form(s, data).branch);
      if (!any_flag) REQUIRE(m_composite(c.parts, data) == direct);
      ++checked;
    }
    CHECK(checked == 100);
  }
}

TEST_CASE("Pow4 traces do not depend on the square root") {
  for (int r = 3; r <= 4; ++r) {
    const GroupTable G(static_cast<u32>(1) << r);
    for (int m = 1; m <= 3; ++m) {
      const i64 sq = m <= 2 ? 17 : 1 + (i64{1} << (2 * m));
      std::size_t roots = 0;
      for (u64 x = 0; x < (u64{1} << r); ++x)
        if ((x * x) % (u64{1} << r) == static_cast<u64>(sq) % (u64{1} << r)) ++roots;
      REQUIRE(roots >= 2);
      auto base = spec(Family::Pow4, 2, r, -1, m);
      const auto H0 = build_subgroup(G, base);
      const CosetAction A0(G, H0);
      for (int root = 1; root < static_cast<int>(roots); ++root) {
        auto other = base;
        other.root = root;
        const auto H = build_subgroup(G, other);
        const CosetAction A(G, H);
        for (std::size_t g = 0; g < G.size(); ++g) REQUIRE(A.trace(g) == A0.trace(g));
      }
    }
  }
}

TEST_CASE("unsupported specs and bad levels") {
  auto code_of = [](auto&& f) -> std::optional<geodesic::errc> {
    try {
      f();
    } catch (const geodesic::Error& e) {
      return e.code();
    }
    return std::nullopt;
  };
  CHECK(code_of([] { build_subgroup(GroupTable(9), spec(Family::Three, 3, 2)); }) ==
        geodesic::errc::unsupported_spec);
  CHECK(code_of([] { m_closed_form(spec(Family::Pow4, 3, 2, -1, 1), pell_class_data(5, 1)); }) ==
        geodesic::errc::unsupported_spec);
  CHECK(code_of([] { MEvaluator(spec(Family::Hat, 2, 7)); }) == geodesic::errc::modulus_too_large);
  CHECK(code_of([] { m_closed_form(spec(Family::Split0, 2, 3, 3), pell_class_data(5, 1)); }) ==
        geodesic::errc::unsupported_spec);
}

TEST_CASE("flags are confined to p = 2") {
  for (u64 p : {3, 5, 7})
    for (int r = 1; r <= 3; ++r)
      for (const auto& s : tabulated_families(p, r))
        for (int b = 0; b < branch_count(s); ++b) CHECK_FALSE(branch_flagged(s, b));
  CHECK(branch_flagged(spec(Family::Split0, 2, 2), 1));
  CHECK_FALSE(branch_flagged(spec(Family::Split0, 2, 3), 1));
  CHECK_FALSE(branch_flagged(spec(Family::Hat, 2, 4), 0));
}
