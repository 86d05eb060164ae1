#include "geodesic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"
#include "geodesic/qforms.hpp"

namespace geodesic::stats {

namespace {

// Neumaier summation.
class Sum {
 public:
  void add(double v) {
    const double t = s_ + v;
    c_ += std::abs(s_) >= std::abs(v) ? (s_ - t) + v : (v - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

 private:
  double s_ = 0, c_ = 0;
};

bool below(const CensusRecord& r, u64 x) { return r.t <= x; }  // eps(t) < x iff t <= x

}  // namespace

double li(double x) {
  if (!(x >= 2)) throw Error(errc::domain_error, "li needs x >= 2");
  if (x == 2) return 0;
  using boost::math::quadrature::gauss_kronrod;
  // t = e^u keeps the integrand smooth over many decades
  return gauss_kronrod<double, 61>::integrate([](double u) { return std::exp(u) / u; }, std::log(2.0),
                                              std::log(x), 30, 1e-14);
}

double zeta3() {
  constexpr int N = 2000;
  double s = 0;
  for (int n = N; n >= 1; --n) s += 1.0 / (double(n) * n * n);
  const double n = N;
  return s + 1 / (2 * n * n) - 1 / (2 * n * n * n) + 1 / (4 * n * n * n * n);
}

double siegel_constant() {
  const double pi = boost::math::constants::pi<double>();
  return pi * pi / (18 * zeta3());
}

MuEstimate mu_estimate(const Condition& c, const std::vector<CensusRecord>& records, u64 x) {
  MuEstimate out;
  out.x = x;
  for (const auto& r : records) {
    if (r.j != 1 || !below(r, x)) continue;
    out.denominator += r.h;
    if (c.holds(r.d)) out.numerator += r.h;
  }
  if (out.denominator == 0) throw Error(errc::empty_census, "no records below x = " + std::to_string(x));
  out.value = static_cast<double>(out.numerator) / static_cast<double>(out.denominator);
  return out;
}

double hatpi(const std::optional<cg::SubgroupSpec>& spec, const std::vector<CensusRecord>& records,
             u64 x) {
  std::optional<cg::MEvaluator> ev;
  if (spec) ev.emplace(*spec);
  Sum sum;
  for (const auto& r : records) {
    if (!below(r, x)) continue;
    u64 M = 1;
    if (ev) M = (*ev)(cg::pell_class_data(r.D, r.d, r.j, pell::BigInt(r.t), pell::BigInt(r.u)));
    if (M) sum.add(static_cast<double>(M) * r.h / r.j);
  }
  return sum.value();
}

SarnakRatio sarnak_ratio(const std::vector<CensusRecord>& records, u64 x) {
  SarnakRatio out;
  out.x = x;
  for (const auto& r : records)
    if (r.j == 1 && below(r, x)) out.sumH += r.h;
  const double xd = static_cast<double>(x);
  out.ratio = static_cast<double>(out.sumH) / li(xd * xd);
  return out;
}

SiegelRatio siegel_ratio(const std::vector<census::DiscriminantEntry>& entries, i64 x) {
  SiegelRatio out;
  out.x = x;
  Sum sum;
  for (const auto& e : entries)
    if (e.disc.D < x) sum.add(e.h * e.logEps);
  out.sum = sum.value();
  out.ratio = out.sum / (siegel_constant() * std::pow(static_cast<double>(x), 1.5));
  return out;
}

SiegelRatio siegel_ratio(i64 x) { return siegel_ratio(census::census_by_discriminant(x), x); }

AlphaRatio alpha_p(u64 p, const std::vector<CensusRecord>& records, u64 x) {
  if (p < 3 || !nt::is_prime(p)) throw Error(errc::domain_error, "alpha_p needs an odd prime");
  AlphaRatio out;
  out.p = p;
  out.x = x;
  std::set<i64> all, divisible;
  for (const auto& r : records) {
    if (r.j != 1 || !below(r, x) || !nt::is_squarefree(static_cast<u64>(r.d))) continue;
    all.insert(r.d);
    if (r.h % static_cast<int>(p) == 0) divisible.insert(r.d);
  }
  out.total = all.size();
  out.divisible = divisible.size();
  if (out.total == 0) throw Error(errc::empty_census, "no square-free d below x = " + std::to_string(x));
  out.value = static_cast<double>(out.divisible) / static_cast<double>(out.total);
  return out;
}

std::vector<H1Entry> h1_census(u64 x, unsigned threads) {
  census::CensusOptions opt;
  opt.filter = [](i64, i64 d) { return nt::is_prime(static_cast<u64>(d)); };
  opt.class_numbers = false;
  opt.fundamental_only = true;
  opt.threads = threads;
  std::vector<H1Entry> candidates;
  census::census_stream(x, opt, [&](const CensusRecord& r) { candidates.push_back({r.d, r.t}); });

  const u64 Dmax = x > 2 ? (x * x) : 4;
  const nt::Factorizer factorizer(std::clamp<u64>(Dmax / 4 + 1, u64{1} << 20, u64{1} << 26));
  qf::ClassNumberEngine engine(factorizer);
  std::vector<H1Entry> out;
  for (const auto& c : candidates) {
    const i64 D = c.d % 4 == 1 ? c.d : 4 * c.d;
    if (engine.class_number_is_one(D)) out.push_back(c);
  }
  return out;
}

std::vector<H1Entry> h1_from_records(const std::vector<CensusRecord>& records, u64 x) {
  std::vector<H1Entry> out;
  for (const auto& r : records)
    if (r.j == 1 && below(r, x) && r.h == 1 && nt::is_prime(static_cast<u64>(r.d)))
      out.push_back({r.d, r.t});
  return out;
}

L1Check l1_crosscheck(i64 D, u64 terms) {
  const auto disc = qf::make_discriminant(D);
  if (!qf::is_fundamental(disc))
    throw Error(errc::domain_error, std::to_string(D) + " is not a fundamental discriminant");
  L1Check out;
  out.D = D;
  const auto fund = pell::pell_fundamental(D);
  out.lhs = qf::class_number(disc) * pell::log_epsilon(fund);
  const double sd = std::sqrt(static_cast<double>(D));
  out.terms = terms ? terms : static_cast<u64>(std::ceil(1e4 * sd));
  Sum L;
  for (u64 n = 1; n <= out.terms; ++n)
    if (const int chi = nt::kronecker(D, static_cast<i64>(n))) L.add(chi / static_cast<double>(n));
  out.rhs = sd * L.value();
  out.relErr = std::abs(out.rhs - out.lhs) / out.lhs;
  // partial sums of chi_D are bounded by D, so the tail is at most 2D / (N + 1)
  const double bound = 2.0 * static_cast<double>(D) / static_cast<double>(out.terms + 1);
  out.tailBound = sd * bound / out.lhs;
  return out;
}

BetaEstimate beta(const Condition& c, const std::vector<census::DiscriminantEntry>& entries, i64 x) {
  BetaEstimate out;
  out.x = x;
  Sum s, all;
  for (const auto& e : entries) {
    if (e.disc.D >= x) continue;
    const double w = e.h * e.logEps;
    all.add(w);
    if (c.holds(e.disc.d)) s.add(w);
  }
  out.sum = s.value();
  out.all = all.value();
  out.beta = out.sum / std::pow(static_cast<double>(x), 1.5);
  out.share = out.all > 0 ? out.sum / out.all : 0;
  return out;
}

}  // namespace geodesic::stats
