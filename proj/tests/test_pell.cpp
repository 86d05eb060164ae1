#include <doctest.h>

#include <cmath>

#include "geodesic/error.hpp"
#include "geodesic/pell.hpp"
#include "oracles.hpp"

using namespace geodesic::pell;

TEST_CASE("pell_fundamental examples") {
  auto check = [](i64 D, int t, int u) {
    const auto s = pell_fundamental(D);
    CHECK(s.j == 1);
    CHECK(s.t == t);
    CHECK(s.u == u);
  };
  check(5, 3, 1);
  check(8, 6, 2);
  check(13, 11, 3);
  check(12, 4, 1);
  check(21, 5, 1);
  try {
    pell_fundamental(4);
    FAIL("expected invalid-discriminant");
  } catch (const geodesic::Error& e) {
    CHECK(e.code() == geodesic::errc::invalid_discriminant);
  }
  CHECK_THROWS_AS(pell_fundamental(7), geodesic::Error);
  CHECK_THROWS_AS(pell_fundamental(0), geodesic::Error);
  CHECK_THROWS_AS(pell_fundamental(-3), geodesic::Error);
}

TEST_CASE("pell_fundamental agrees with a brute-force scan for D < 1000") {
  constexpr u64 kScan = 200'000;
  for (i64 D = 5; D < 1000; ++D) {
    if (!is_discriminant(D)) continue;
    const auto s = pell_fundamental(D);
    REQUIRE(s.t * s.t - D * s.u * s.u == 4);
    const auto brute = oracle::pell_scan(D, kScan);
    INFO("D=", D);
    if (brute) {
      REQUIRE(s.t == brute->first);
      REQUIRE(s.u == brute->second);
    } else {
      REQUIRE(s.u > kScan);
    }
  }
}

TEST_CASE("bounded Pell matches the big-integer path") {
  for (i64 D = 5; D < 3000; ++D) {
    if (!is_discriminant(D)) continue;
    const auto big = pell_fundamental(D);
    const auto small = pell_fundamental_bounded(D, 1'000'000'000);
    if (big.u <= 1'000'000'000) {
      REQUIRE(small.has_value());
      REQUIRE(big.t == small->t);
      REQUIRE(big.u == small->u);
    } else {
      REQUIRE_FALSE(small.has_value());
    }
  }
}

TEST_CASE("pell_power examples") {
  const auto f5 = pell_fundamental(5);
  const auto p = pell_power(f5, 2);
  CHECK(p.t == 7);
  CHECK(p.u == 3);
  CHECK(p.j == 2);
  CHECK(pell_power(f5, 1) == f5);
  const auto p8 = pell_power(pell_fundamental(8), 2);
  CHECK(p8.t == 34);
  CHECK(p8.u == 12);
  CHECK_THROWS_AS(pell_power(f5, 0), geodesic::Error);
}

TEST_CASE("pell_power equals the binomial expansion of the j-th power") {
  // 2^{j-1} (t_j + u_j sqrt D) = (t_1 + u_1 sqrt D)^j, expanded as pairs
  for (i64 D = 5; D < 500; ++D) {
    if (!is_discriminant(D)) continue;
    const auto f = pell_fundamental(D);
    BigInt x = f.t, y = f.u;
    for (int j = 1; j <= 6; ++j) {
      const auto pj = pell_power(f, j);
      const BigInt scale = BigInt(1) << (j - 1);
      REQUIRE(pj.t * scale == x);
      REQUIRE(pj.u * scale == y);
      REQUIRE(pj.t * pj.t - D * pj.u * pj.u == 4);
      BigInt nx = x * f.t + D * y * f.u;
      BigInt ny = x * f.u + y * f.t;
      x = nx;
      y = ny;
    }
  }
}

TEST_CASE("pell_power matches the j-th solution of a direct scan for small D") {
  for (i64 D : {5, 8, 12, 13, 17, 21, 24, 28, 32, 33}) {
    std::vector<std::pair<u64, u64>> sols;
    for (u64 u = 1; u <= 3'000'000 && sols.size() < 4; ++u) {
      const unsigned __int128 t2 = 4 + static_cast<unsigned __int128>(D) * u * u;
      if (oracle::perfect_square(t2)) sols.emplace_back(static_cast<u64>(oracle::exact_sqrt(t2)), u);
    }
    const auto f = pell_fundamental(D);
    for (std::size_t j = 1; j <= sols.size(); ++j) {
      const auto pj = pell_power(f, static_cast<int>(j));
      INFO("D=", D, " j=", j);
      CHECK(pj.t == sols[j - 1].first);
      CHECK(pj.u == sols[j - 1].second);
    }
  }
}

TEST_CASE("epsilon_below examples") {
  const auto f5 = pell_fundamental(5);
  CHECK(epsilon_below(f5, 3));
  CHECK_FALSE(epsilon_below(f5, 2));
  const auto f8 = pell_fundamental(8);
  CHECK(epsilon_below(f8, 6));
  CHECK_FALSE(epsilon_below(f8, 5));
  CHECK(epsilon_below(3, 1, 5, 3));
  CHECK_FALSE(epsilon_below(3, 1, 5, 2));
  CHECK(epsilon_below(6, 2, 8, 6));
}

TEST_CASE("epsilon_below is monotone and consistent with log_epsilon") {
  for (i64 D = 5; D < 300; ++D) {
    if (!is_discriminant(D)) continue;
    const auto f = pell_fundamental(D);
    for (int j = 1; j <= 3; ++j) {
      const auto s = pell_power(f, j);
      const double le = log_epsilon(s);
      bool previous = false;
      for (u64 x = 2; x < 200000; x = x * 3 / 2 + 1) {
        const bool below = epsilon_below(s, BigInt(x));
        REQUIRE((!previous || below));  // once true, stays true
        previous = below;
        const double lx = std::log(static_cast<double>(x));
        if (std::abs(le - lx) > 1e-9) REQUIRE(below == (le < lx));
      }
    }
  }
}

TEST_CASE("log_epsilon values") {
  CHECK(log_epsilon(pell_fundamental(5)) == doctest::Approx(0.962423650119206895).epsilon(1e-14));
  CHECK(log_epsilon(pell_fundamental(8)) == doctest::Approx(1.762747174039086050).epsilon(1e-14));
  // eps + 1/eps = t gives log eps - log t = log(1 - 1/(t eps)), so the gap
  // lies between 1/t^2 and 1/t^2 + 2/t^4.
  for (double t = 10; t < 3000; t *= 1.7) {
    const double gap = std::log(t) - log_epsilon_from_trace(t);
    CHECK(gap > 1 / (t * t) * (1 - 1e-6));
    CHECK(gap < 1 / (t * t) + 2 / (t * t * t * t));
  }
}

TEST_CASE("log_epsilon for very large traces") {
  const BigInt t = BigInt(1) << 2000;
  CHECK(log_epsilon_from_trace(t) == doctest::Approx(2000 * std::log(2.0)).epsilon(1e-14));
  const auto f = pell_fundamental(4 * 94);
  CHECK(f.t > 1'000'000);
  CHECK(f.t * f.t - 4 * 94 * f.u * f.u == 4);
  CHECK(log_epsilon(f) == doctest::Approx(std::log(f.t.convert_to<double>())).epsilon(1e-12));
}

TEST_CASE("epsilon identity t^2 - 4 = D u^2 for produced solutions") {
  for (i64 D = 5; D < 2000; ++D) {
    if (!is_discriminant(D)) continue;
    const auto f = pell_fundamental(D);
    for (int j = 1; j <= 3; ++j) {
      const auto s = pell_power(f, j);
      REQUIRE(s.t * s.t - 4 == D * s.u * s.u);
    }
  }
}
