#pragma once

#include <optional>
#include <vector>

#include "geodesic/census.hpp"
#include "geodesic/condition.hpp"
#include "geodesic/congruence.hpp"

namespace geodesic::stats {

using census::CensusRecord;

/// Logarithmic integral from 2, by adaptive Gauss-Kronrod quadrature.
double li(double x);

/// zeta(3) by direct summation with an Euler-Maclaurin tail.
double zeta3();

/// pi^2 / (18 zeta(3)).
double siegel_constant();

struct MuEstimate {
  u64 x = 0;
  long long numerator = 0;    // sum of h over matching records
  long long denominator = 0;  // sum of h over all records
  double value = 0;
};

/// Class-number weighted share of fundamental records (j = 1, eps < x)
/// whose companion satisfies c. Records must carry class numbers.
MuEstimate mu_estimate(const Condition& c, const std::vector<CensusRecord>& records, u64 x);

/// sum over records with eps^j < x of M(D, j) h(D) / j; no spec means SL2(Z).
double hatpi(const std::optional<cg::SubgroupSpec>& spec, const std::vector<CensusRecord>& records,
             u64 x);

struct SarnakRatio {
  u64 x = 0;
  long long sumH = 0;
  double ratio = 0;  // sumH / li(x^2)
};

SarnakRatio sarnak_ratio(const std::vector<CensusRecord>& records, u64 x);

struct SiegelRatio {
  i64 x = 0;
  double sum = 0;    // sum over D < x of h log eps
  double ratio = 0;  // sum / (siegel_constant() x^(3/2))
};

SiegelRatio siegel_ratio(const std::vector<census::DiscriminantEntry>& entries, i64 x);
SiegelRatio siegel_ratio(i64 x);

struct AlphaRatio {
  u64 p = 0;
  u64 x = 0;
  std::size_t divisible = 0;
  std::size_t total = 0;
  double value = 0;
};

/// Share of distinct squarefree d with eps(D) < x whose class number is
/// divisible by p. Records come from squarefree_census.
AlphaRatio alpha_p(u64 p, const std::vector<CensusRecord>& records, u64 x);

struct H1Entry {
  i64 d = 0;
  u64 t = 0;
};

/// Primes d with h(D) = 1 and eps(D) < x, in order of eps. Runs its own
/// census without class numbers and tests h = 1 directly.
std::vector<H1Entry> h1_census(u64 x, unsigned threads = 0);

/// Same from records that already carry class numbers.
std::vector<H1Entry> h1_from_records(const std::vector<CensusRecord>& records, u64 x);

struct L1Check {
  i64 D = 0;
  double lhs = 0;  // h log eps
  double rhs = 0;  // sqrt(D) * partial L(1, chi_D)
  double relErr = 0;
  double tailBound = 0;  // bound on the truncated tail, relative to lhs
  u64 terms = 0;
};

/// Class number formula at a fundamental discriminant.
L1Check l1_crosscheck(i64 D, u64 terms = 0);

struct BetaEstimate {
  i64 x = 0;
  double sum = 0;   // sum over D < x satisfying c of h log eps
  double all = 0;   // same without the condition
  double beta = 0;  // sum / x^(3/2)
  double share = 0; // sum / all
};

/// Exploratory D-ordered conditional sums.
BetaEstimate beta(const Condition& c, const std::vector<census::DiscriminantEntry>& entries, i64 x);

}  // namespace geodesic::stats
