#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "geodesic/census.hpp"
#include "geodesic/error.hpp"
#include "oracles.hpp"

using namespace geodesic::census;
using geodesic::pell::BigInt;

namespace fs = std::filesystem;

namespace {

// (D, j) pairs with eps(D)^j < x, found by walking every D < x^2 instead of
// every trace.
std::map<std::pair<i64, int>, std::pair<BigInt, BigInt>> by_discriminant_scan(u64 x) {
  std::map<std::pair<i64, int>, std::pair<BigInt, BigInt>> out;
  for (i64 D = 5; D < static_cast<i64>(x * x); ++D) {
    if (!geodesic::pell::is_discriminant(D)) continue;
    const auto f = geodesic::pell::pell_fundamental(D);
    for (int j = 1;; ++j) {
      const auto s = geodesic::pell::pell_power(f, j);
      if (!geodesic::pell::epsilon_below(s, BigInt(x))) break;
      out[{D, j}] = {s.t, s.u};
    }
  }
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("geodesic-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("census_stream example at xMax = 6") {
  // eps(8) = eps(32) = 3 + 2 sqrt 2 = 5.83 also lies below 6 (trace 6)
  const auto r = census(6);
  REQUIRE(r.size() == 5);
  CHECK(r[0] == CensusRecord{3, 1, 5, 5, 1, 1, r[0].logEps});
  CHECK(r[1] == CensusRecord{4, 1, 12, 3, 1, 2, r[1].logEps});
  CHECK(r[2] == CensusRecord{5, 1, 21, 21, 1, 2, r[2].logEps});
  CHECK(r[3] == CensusRecord{6, 2, 8, 2, 1, 1, r[3].logEps});
  CHECK(r[4] == CensusRecord{6, 1, 32, 8, 1, 2, r[4].logEps});
  CHECK(r[0].logEps == doctest::Approx(0.962423650119206895));
  CHECK(census(5).size() == 3);
  CHECK(census(2).empty());
  CHECK(census(3).size() == 1);  // eps(5) = 2.618..
}

TEST_CASE("record (t=7, u=3) is the square of eps(5)") {
  bool found = false;
  for (const auto& r : census(10))
    if (r.t == 7 && r.u == 3) {
      CHECK(r.D == 5);
      CHECK(r.j == 2);
      CHECK(r.h == 1);
      found = true;
    }
  CHECK(found);
}

TEST_CASE("census is a bijection onto {(D, j) : eps(D)^j < x}") {
  for (u64 x : {4, 10, 57, 100, 300}) {
    const auto expected = by_discriminant_scan(x);
    std::map<std::pair<i64, int>, std::pair<BigInt, BigInt>> got;
    for (const auto& r : census(x, CensusOptions{.class_numbers = false})) {
      INFO("x=", x, " t=", r.t, " u=", r.u);
      REQUIRE(got.emplace(std::pair{r.D, r.j}, std::pair{BigInt(r.t), BigInt(r.u)}).second);
      REQUIRE(static_cast<oracle::i64>(r.t) * r.t - 4 == r.D * static_cast<i64>(r.u * r.u));
    }
    CHECK(got == expected);
  }
}

TEST_CASE("records are ordered by trace, then by D") {
  const auto r = census(500, CensusOptions{.class_numbers = false});
  for (std::size_t i = 1; i < r.size(); ++i) {
    REQUIRE(r[i - 1].t <= r[i].t);
    if (r[i - 1].t == r[i].t) REQUIRE(r[i - 1].D < r[i].D);
  }
}

TEST_CASE("sum of h over j = 1 at x = 100 matches a discriminant scan") {
  long long stream_sum = 0;
  for (const auto& r : census(100))
    if (r.j == 1) stream_sum += r.h;
  long long scan_sum = 0;
  for (i64 D = 5; D <= 10'000; ++D) {
    if (!geodesic::pell::is_discriminant(D)) continue;
    const auto f = geodesic::pell::pell_fundamental(D);
    if (!geodesic::pell::epsilon_below(f, BigInt(100))) continue;
    scan_sum += geodesic::qf::class_number(geodesic::qf::make_discriminant(D));
  }
  CHECK(stream_sum == scan_sum);
  CHECK(stream_sum > 0);
}

TEST_CASE("companion d and class numbers agree with the qforms module") {
  for (const auto& r : census(200)) {
    const auto disc = geodesic::qf::make_discriminant(r.D);
    REQUIRE(r.d == disc.d);
    REQUIRE(r.h == geodesic::qf::class_number(disc));
    REQUIRE(r.logEps == doctest::Approx(std::log((r.t + std::sqrt(double(r.t) * r.t - 4)) / 2)));
  }
}

TEST_CASE("odd traces never lose a square divisor to the parity filter") {
  std::map<u64, std::size_t> per_trace;
  for (const auto& r : census(400, CensusOptions{.class_numbers = false})) {
    ++per_trace[r.t];
    if (r.t % 2 == 1) REQUIRE(r.D % 8 == 5);
  }
  for (u64 t = 3; t <= 400; t += 2) {
    const u64 n = (t - 2) * (t + 2);
    REQUIRE(per_trace[t] == oracle::square_divisors(n).size());
  }
}

TEST_CASE("higher powers carry a vanishing share of the weight") {
  double prev_share = 1;
  for (u64 x : {100, 1000, 3000}) {
    double all = 0, higher = 0;
    for (const auto& r : census(x)) {
      all += static_cast<double>(r.h) / r.j;
      if (r.j >= 2) higher += static_cast<double>(r.h) / r.j;
    }
    const double share = higher / all;
    CHECK(share < prev_share);
    prev_share = share;
  }
  CHECK(prev_share < 0.01);
}

TEST_CASE("thread count does not change the output") {
  const auto one = census(1500, CensusOptions{.threads = 1});
  const auto three = census(1500, CensusOptions{.threads = 3});
  CHECK(one == three);
}

TEST_CASE("filter and fundamental_only") {
  const auto odd = census(300, CensusOptions{
                                   .filter = [](i64 D, i64) { return D % 2 == 1; },
                                   .class_numbers = false,
                               });
  for (const auto& r : odd) CHECK(r.D % 2 == 1);
  const auto fund = census(300, CensusOptions{.class_numbers = false, .fundamental_only = true});
  for (const auto& r : fund) CHECK(r.j == 1);
}

TEST_CASE("squarefree_census") {
  const auto r10 = squarefree_census(10);
  std::vector<i64> ds;
  for (const auto& r : r10) ds.push_back(r.d);
  CHECK(std::find(ds.begin(), ds.end(), 5) != ds.end());
  CHECK(std::find(ds.begin(), ds.end(), 2) != ds.end());
  CHECK(std::find(ds.begin(), ds.end(), 3) != ds.end());

  std::size_t brute = 0;
  for (const auto& r : census(100)) {
    if (r.j != 1) continue;
    const auto f = oracle::trial_factor(static_cast<u64>(r.d));
    if (std::all_of(f.begin(), f.end(), [](auto pe) { return pe.second == 1; })) ++brute;
  }
  const auto r100 = squarefree_census(100);
  CHECK(r100.size() == brute);
  for (const auto& r : r100) {
    CHECK(r.d != 45);
    CHECK(r.j == 1);
  }
}

TEST_CASE("census_by_discriminant") {
  const auto e13 = census_by_discriminant(13);
  REQUIRE(e13.size() == 3);
  CHECK(e13[0].disc.D == 5);
  CHECK(e13[1].disc.D == 8);
  CHECK(e13[2].disc.D == 12);
  CHECK(e13[2].h == 2);

  const auto e100 = census_by_discriminant(100);
  std::size_t count = 0;
  for (i64 D = 1; D < 100; ++D)
    if ((D % 4 == 0 || D % 4 == 1) && !oracle::perfect_square(static_cast<unsigned __int128>(D))) ++count;
  CHECK(e100.size() == count);
  for (const auto& e : census_by_discriminant(2000)) {
    REQUIRE(e.fund.t * e.fund.t - e.disc.D * e.fund.u * e.fund.u == 4);
    REQUIRE(e.disc == geodesic::qf::make_discriminant(e.disc.D));
  }
}

TEST_CASE("overflow beyond the fixed-width trace range") {
  try {
    census(kMaxTrace + 1);
    FAIL("expected overflow");
  } catch (const geodesic::Error& e) {
    CHECK(e.code() == geodesic::errc::overflow);
  }
}

TEST_CASE("cache round trip and prefix reuse") {
  const auto dir = scratch_dir("cache");
  const auto records = census(100);
  const auto path = dir / cache_file_name(100, false);
  cache_write(path, CensusFile{100, false, records});
  const auto back = cache_read(path);
  CHECK(back.xMax == 100);
  CHECK_FALSE(back.squarefree);
  CHECK(back.records == records);

  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "#geodesic-census v1 xmax=100");
  std::string first;
  std::getline(in, first);
  CHECK(first == "3,1,5,5,1,1");

  CHECK(prefix(records, 50) == census(50));
  CHECK(load_or_compute(dir, 50, false) == census(50));
  CHECK(load_or_compute(dir, 50, true) == squarefree_census(50));
  CHECK(!fs::exists(dir / cache_file_name(50, false)));

  // a fresh size is computed and written
  CHECK(load_or_compute(dir, 120, false) == census(120));
  CHECK(fs::exists(dir / cache_file_name(120, false)));
  CHECK(load_or_compute({}, 30, false) == census(30));
}

TEST_CASE("byte-identical cache across runs") {
  const auto dir = scratch_dir("determinism");
  cache_write(dir / "a.csv", CensusFile{300, false, census(300, CensusOptions{.threads = 1})});
  cache_write(dir / "b.csv", CensusFile{300, false, census(300, CensusOptions{.threads = 2})});
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
}

TEST_CASE("corrupt caches are rejected") {
  const auto dir = scratch_dir("corrupt");
  const auto path = dir / "c.csv";
  cache_write(path, CensusFile{100, false, census(100)});
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto expect = [&](const std::string& content, geodesic::errc code) {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << content;
    try {
      cache_read(path);
      FAIL("expected failure");
    } catch (const geodesic::Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect(text.substr(0, text.size() / 2), geodesic::errc::corrupt_cache);   // truncated
  expect(text.substr(0, text.rfind("#end")), geodesic::errc::corrupt_cache);  // no trailer
  std::string tampered = text;
  tampered.replace(tampered.find("\n4,1,12,3,1,2\n"), 14, "\n4,1,12,3,1,3\n");
  expect(tampered, geodesic::errc::corrupt_cache);  // checksum
  std::string wrong_d = text;
  wrong_d.replace(wrong_d.find("\n4,1,12,3,1,2\n"), 14, "\n4,1,12,12,1,2\n");
  expect(wrong_d, geodesic::errc::corrupt_cache);  // invariant
  std::string v2 = text;
  v2.replace(0, std::string("#geodesic-census v1").size(), "#geodesic-census v2");
  expect(v2, geodesic::errc::version_mismatch);
  expect("not a cache\n", geodesic::errc::corrupt_cache);
  CHECK_THROWS_AS(cache_read(dir / "missing.csv"), geodesic::Error);
}
