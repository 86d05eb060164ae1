#include "geodesic/census.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"

namespace geodesic::census {

namespace {

using nt::PrimePower;
using nt::u128;

constexpr u64 kChunk = 512;
constexpr u64 kMaxSieve = u64{1} << 27;

// eps(t) = (t + sqrt(t^2 - 4))/2 < x  <=>  t < x + 1/x, so for integer x the
// admissible traces are exactly 3..x.
u64 trace_limit(u64 xMax) { return xMax; }

u64 sieve_limit_for(u64 xMax, bool class_numbers) {
  u128 need = xMax + 2;
  if (class_numbers) need = std::max<u128>(need, static_cast<u128>(xMax) * xMax / 4);
  return static_cast<u64>(std::clamp<u128>(need, u64{1} << 20, kMaxSieve));
}

struct Worker {
  const nt::Factorizer& factorizer;
  const CensusOptions& options;
  qf::ClassNumberEngine engine;
  std::vector<PrimePower> raw;
  std::vector<PrimePower> merged;
  std::vector<std::pair<u64, std::vector<int>>> squares;  // u and its exponents
  std::unordered_map<i64, int> h_memo;

  Worker(const nt::Factorizer& f, const CensusOptions& o)
      : factorizer(f), options(o), engine(f) {}

  int class_number(i64 D) {
    auto [it, fresh] = h_memo.try_emplace(D, 0);
    if (fresh) it->second = engine.class_number(D);
    return it->second;
  }

  void run(u64 t_begin, u64 t_end, std::vector<CensusRecord>& out) {
    h_memo.clear();
    for (u64 t = t_begin; t < t_end; ++t) trace(t, out);
  }

  void trace(u64 t, std::vector<CensusRecord>& out) {
    raw.clear();
    factorizer.append_factors(t - 2, raw);
    factorizer.append_factors(t + 2, raw);
    merged = nt::normalize_factors(raw);

    // every u with u^2 | t^2 - 4, with the exponents of u kept alongside
    squares.assign(1, {1, std::vector<int>(merged.size(), 0)});
    for (std::size_t i = 0; i < merged.size(); ++i) {
      const std::size_t base = squares.size();
      u64 pk = 1;
      for (int k = 1; 2 * k <= merged[i].e; ++k) {
        pk *= static_cast<u64>(merged[i].p);
        for (std::size_t s = 0; s < base; ++s) {
          auto next = squares[s];
          next.first *= pk;
          next.second[i] = k;
          squares.push_back(std::move(next));
        }
      }
    }
    std::sort(squares.begin(), squares.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    const u128 n = static_cast<u128>(t - 2) * (t + 2);
    for (const auto& [u, ku] : squares) {
      const u128 Dw = n / (static_cast<u128>(u) * u);
      const auto D = static_cast<i64>(Dw);
      if (D % 4 == 2 || D % 4 == 3) continue;

      u128 core = 1;
      for (std::size_t i = 0; i < merged.size(); ++i)
        if ((merged[i].e - 2 * ku[i]) % 2 != 0) core *= merged[i].p;
      const i64 d = core % 4 == 1 ? D : D / 4;
      if (options.filter && !options.filter(D, d)) continue;

      const int j = solution_index(t, u, D);
      if (options.fundamental_only && j != 1) continue;

      CensusRecord r;
      r.t = t;
      r.u = u;
      r.D = D;
      r.d = d;
      r.j = j;
      r.h = options.class_numbers ? class_number(D) : 0;
      r.logEps = pell::log_epsilon_from_trace(static_cast<double>(t));
      out.push_back(r);
    }
  }

  static int solution_index(u64 t, u64 u, i64 D) {
    const auto fund = pell::pell_fundamental_bounded(D, u);
    if (!fund) throw Error(errc::overflow, "fundamental solution exceeds the census bound");
    // (t_j + u_j sqrt D)/2 = ((t_1 + u_1 sqrt D)/2)^j, in 128-bit arithmetic
    const u128 t1 = fund->t, u1 = fund->u, Dw = static_cast<u128>(D);
    u128 tj = t1, uj = u1;
    int j = 1;
    while (tj < t) {
      const u128 nt_ = (t1 * tj + Dw * u1 * uj) / 2;
      const u128 nu = (t1 * uj + u1 * tj) / 2;
      tj = nt_;
      uj = nu;
      ++j;
    }
    if (tj != t || uj != u) throw Error(errc::domain_error, "trace is not a power of the fundamental unit");
    return j;
  }
};

}  // namespace

void census_stream(u64 xMax, const CensusOptions& options,
                   const std::function<void(const CensusRecord&)>& sink) {
  const u64 T = trace_limit(xMax);
  if (T < 3) return;
  if (T > kMaxTrace) throw Error(errc::overflow, "census traces beyond " + std::to_string(kMaxTrace));

  const nt::Factorizer factorizer(sieve_limit_for(xMax, options.class_numbers));
  const u64 chunks = (T - 3) / kChunk + 1;
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = static_cast<unsigned>(std::clamp<u64>(threads, 1, chunks));

  auto chunk_range = [&](u64 c) {
    const u64 begin = 3 + c * kChunk;
    return std::pair{begin, std::min(T + 1, begin + kChunk)};
  };

  if (threads == 1) {
    Worker w(factorizer, options);
    std::vector<CensusRecord> buf;
    for (u64 c = 0; c < chunks; ++c) {
      buf.clear();
      const auto [b, e] = chunk_range(c);
      w.run(b, e, buf);
      for (const auto& r : buf) sink(r);
    }
    return;
  }

  std::vector<std::vector<CensusRecord>> results(chunks);
  std::vector<char> ready(chunks, 0);
  std::exception_ptr failure;
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<u64> next{0};
  std::atomic<bool> stop{false};

  auto work = [&] {
    Worker w(factorizer, options);
    for (;;) {
      const u64 c = next.fetch_add(1);
      if (c >= chunks || stop) return;
      std::vector<CensusRecord> buf;
      try {
        const auto [b, e] = chunk_range(c);
        w.run(b, e, buf);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        stop = true;
        cv.notify_all();
        return;
      }
      std::lock_guard lock(mu);
      results[c] = std::move(buf);
      ready[c] = 1;
      cv.notify_all();
    }
  };

  std::vector<std::jthread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);

  for (u64 c = 0; c < chunks; ++c) {
    std::vector<CensusRecord> buf;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return ready[c] || failure; });
      if (failure) break;
      buf = std::move(results[c]);
    }
    try {
      for (const auto& r : buf) sink(r);
    } catch (...) {
      stop = true;
      throw;
    }
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

std::vector<CensusRecord> census(u64 xMax, const CensusOptions& options) {
  std::vector<CensusRecord> out;
  census_stream(xMax, options, [&](const CensusRecord& r) { out.push_back(r); });
  return out;
}

std::vector<CensusRecord> squarefree_census(u64 xMax, unsigned threads) {
  CensusOptions o;
  o.filter = [](i64, i64 d) { return nt::is_squarefree(static_cast<u64>(d)); };
  o.fundamental_only = true;
  o.threads = threads;
  return census(xMax, o);
}

std::vector<DiscriminantEntry> census_by_discriminant(i64 Dmax) {
  std::vector<DiscriminantEntry> out;
  if (Dmax <= 5) return out;
  const nt::Factorizer factorizer(
      std::clamp<u64>(static_cast<u64>(Dmax) / 4 + 1, u64{1} << 20, kMaxSieve));
  qf::ClassNumberEngine engine(factorizer);
  for (i64 D = 5; D < Dmax; ++D) {
    if (!pell::is_discriminant(D)) continue;
    DiscriminantEntry e;
    const auto sf = factorizer.factorize(static_cast<u128>(D));
    i64 core = 1;
    for (const auto& [p, k] : sf.factors)
      if (k % 2) core *= static_cast<i64>(p);
    e.disc = qf::Discriminant{D, core % 4 == 1 ? D : D / 4, core};
    e.fund = pell::pell_fundamental(D);
    e.h = engine.class_number(D);
    e.logEps = pell::log_epsilon(e.fund);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CensusRecord> prefix(const std::vector<CensusRecord>& records, u64 xMax) {
  std::vector<CensusRecord> out;
  for (const auto& r : records)
    if (pell::epsilon_below(r.t, r.u, r.D, xMax)) out.push_back(r);
  return out;
}

}  // namespace geodesic::census
