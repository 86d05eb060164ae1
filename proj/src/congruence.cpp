#include "geodesic/congruence.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"
#include "geodesic/qforms.hpp"

namespace geodesic::cg {

namespace {

u32 mulmod(u32 x, u32 y, u32 N) { return static_cast<u32>(u64{x} * y % N); }

u32 inverse_mod(u32 x, u32 N) {
  for (u32 y = 1; y < N; ++y)
    if (mulmod(x, y, N) == 1 % N) return y;
  throw Error(errc::domain_error, "no inverse of " + std::to_string(x) + " mod " + std::to_string(N));
}

MatModN make(u32 N, i64 a, i64 b, i64 c, i64 d) {
  auto r = [N](i64 v) { return static_cast<u32>(((v % N) + N) % N); };
  return MatModN{N, r(a), r(b), r(c), r(d)};
}

u32 reduce_big(const BigInt& v, u32 N) {
  BigInt r = v % N;
  if (r < 0) r += N;
  return r.convert_to<u32>();
}

u64 expected_order(const SubgroupSpec& s) {
  const u64 N = s.level();
  const u64 scalars = square_roots_of_one(static_cast<u32>(N)).size();
  switch (s.family) {
    case Family::Hat: return 1;
    case Family::Split0: return N;
    case Family::Plus: return N / s.p * (s.p - 1) / scalars;
    case Family::Minus: return N / s.p * (s.p + 1) / scalars;
    case Family::Three:
    case Family::Pow4: return 0;  // cyclic, order not prescribed
  }
  return 0;
}

std::vector<MatModN> generators(const SubgroupSpec& s) {
  const u32 N = static_cast<u32>(s.level());
  std::vector<MatModN> out;
  switch (s.family) {
    case Family::Hat:
      break;
    case Family::Split0:
      for (u32 b = 0; b < N; ++b) out.push_back(make(N, 1, b, 0, 1));
      break;
    case Family::Plus:
      for (u32 x = 1; x < N; ++x)
        if (nt::gcd(x, N) == 1) out.push_back(make(N, x, 0, 0, inverse_mod(x, N)));
      break;
    case Family::Minus:
      if (s.p == 2) {
        // norm-one units of Z/2^r[w], w^2 = w + 1, acting as a I + b W
        for (u32 a = 0; a < N; ++a)
          for (u32 b = 0; b < N; ++b)
            if ((u64{a} * a + u64{a} * b + u64{N} * N - u64{b} * b) % N == 1 % N)
              out.push_back(make(N, a, b, b, a + b));
      } else {
        i64 nu = 2;
        while (nt::kronecker(nu, static_cast<i64>(s.p)) != -1) ++nu;
        for (u32 a = 0; a < N; ++a)
          for (u32 b = 0; b < N; ++b)
            if ((static_cast<i64>(a) * a - nu * b % N * b % N + static_cast<i64>(N) * N) % N == 1 % N)
              out.push_back(make(N, a, static_cast<i64>(b) * nu, b, a));
      }
      break;
    case Family::Three:
      out.push_back(make(N, 2, 1, 3, 2));
      break;
    case Family::Pow4: {
      if (s.m < 1) throw Error(errc::unsupported_spec, "Pow4 needs m >= 1");
      const i64 square = s.m <= 2 ? 17 : 1 + (i64{1} << (2 * s.m));
      const auto roots = nt::sqrt_mod_prime_power(square, 2, s.r);
      if (roots.empty() || s.root < 0 || static_cast<std::size_t>(s.root) >= roots.size())
        throw Error(errc::construction_failure, "no square root for " + s.name());
      const i64 x = static_cast<i64>(roots[static_cast<std::size_t>(s.root)]);
      if (s.m == 1) out.push_back(make(N, x, 4, 4, x));
      else if (s.m == 2) out.push_back(make(N, x, 2, 8, x));
      else out.push_back(make(N, x, 1, i64{1} << (2 * s.m), x));
      break;
    }
  }
  return out;
}

void validate(const SubgroupSpec& s) {
  if (!nt::is_prime(s.p) || s.r < 1)
    throw Error(errc::unsupported_spec, "level must be a prime power: " + s.name());
  if ((s.family == Family::Three || s.family == Family::Pow4) && s.p != 2)
    throw Error(errc::unsupported_spec, s.name() + " exists only for p = 2");
  if (s.l > s.r) throw Error(errc::unsupported_spec, "l > r in " + s.name());
}

}  // namespace

// ---------------------------------------------------------------------------

MatModN MatModN::operator*(const MatModN& o) const {
  return MatModN{N, static_cast<u32>((u64{a} * o.a + u64{b} * o.c) % N),
                 static_cast<u32>((u64{a} * o.b + u64{b} * o.d) % N),
                 static_cast<u32>((u64{c} * o.a + u64{d} * o.c) % N),
                 static_cast<u32>((u64{c} * o.b + u64{d} * o.d) % N)};
}

MatModN MatModN::inverse() const { return make(N, d, -static_cast<i64>(b), -static_cast<i64>(c), a); }

MatModN MatModN::reduce(u32 M) const { return MatModN{M, a % M, b % M, c % M, d % M}; }

u32 MatModN::det() const {
  return static_cast<u32>((u64{a} * d + u64{N} * N - u64{b} * c % N) % N);
}

std::vector<u32> square_roots_of_one(u32 N) {
  std::vector<u32> out;
  for (u32 x = 0; x < N; ++x)
    if (mulmod(x, x, N) == 1 % N) out.push_back(x);
  return out;
}

GroupTable::GroupTable(u32 N) : N_(N) {
  if (N < 2) throw Error(errc::domain_error, "PSL2(Z/NZ) needs N >= 2");
  if (N > kMaxModulus)
    throw Error(errc::modulus_too_large,
                "N = " + std::to_string(N) + " exceeds " + std::to_string(kMaxModulus));
  scalars_ = square_roots_of_one(N);
  for (u32 a = 0; a < N; ++a)
    for (u32 b = 0; b < N; ++b)
      for (u32 c = 0; c < N; ++c)
        for (u32 d = 0; d < N; ++d) {
          const MatModN m{N, a, b, c, d};
          if (m.det() != 1 % N) continue;
          if (canonical(m) == m) {
            index_.emplace(m.code(), elements_.size());
            elements_.push_back(m);
          }
        }
  identity_ = index_of(MatModN{N, 1 % N, 0, 0, 1 % N});
}

MatModN GroupTable::canonical(const MatModN& m) const {
  MatModN best = m;
  for (u32 s : scalars_) {
    const MatModN x{N_, mulmod(s, m.a, N_), mulmod(s, m.b, N_), mulmod(s, m.c, N_),
                    mulmod(s, m.d, N_)};
    if (x.code() < best.code()) best = x;
  }
  return best;
}

std::size_t GroupTable::index_of(const MatModN& m) const {
  if (m.N != N_) throw Error(errc::domain_error, "matrix modulus does not match the group");
  const auto it = index_.find(canonical(m).code());
  if (it == index_.end()) throw Error(errc::domain_error, "matrix is not in SL2");
  return it->second;
}

std::size_t GroupTable::multiply(std::size_t i, std::size_t j) const {
  return index_of(elements_[i] * elements_[j]);
}

std::size_t GroupTable::inverse(std::size_t i) const { return index_of(elements_[i].inverse()); }

u64 principal_index(u64 N) {
  u64 out = 1;
  for (const auto& [p, r] : nt::factorize(N).factors) {
    const auto q = static_cast<u64>(p);
    if (q == 2) out *= r == 1 ? 6 : r == 2 ? 24 : 3 * (u64{1} << (3 * r - 4));
    else out *= nt::ipow(q, 3 * r - 2) * (q * q - 1) / 2;
  }
  return out;
}

// ---------------------------------------------------------------------------

u64 SubgroupSpec::level() const { return nt::ipow(p, r); }

std::string SubgroupSpec::name() const {
  const std::string lvl = std::to_string(level());
  std::string base;
  switch (family) {
    case Family::Hat: base = "Hat(" + lvl + ")"; break;
    case Family::Split0: base = "G(" + lvl + ";0)"; break;
    case Family::Plus: base = "G(" + lvl + ";+)"; break;
    case Family::Minus: base = "G(" + lvl + ";-)"; break;
    case Family::Three: base = "G(" + lvl + ";3)"; break;
    case Family::Pow4:
      base = "G(" + lvl + ";2^" + std::to_string(2 * m) + ")";
      if (root) base += "[root " + std::to_string(root) + "]";
      break;
  }
  if (l >= 0) base += "&Hat(" + std::to_string(nt::ipow(p, r - l)) + ")";
  return base;
}

u64 composite_level(const CompositeSpec& spec) {
  u64 N = 1;
  for (const auto& s : spec) N *= s.level();
  return N;
}

std::string composite_name(const CompositeSpec& spec) {
  std::string out;
  for (const auto& s : spec) out += (out.empty() ? "" : "&") + s.name();
  return out;
}

Subgroup build_subgroup(const GroupTable& G, const SubgroupSpec& spec) {
  validate(spec);
  const u32 N = G.modulus();
  if (spec.level() != N)
    throw Error(errc::unsupported_spec, spec.name() + " does not live in PSL2(Z/" + std::to_string(N) + ")");

  Subgroup H;
  H.member.assign(G.size(), 0);
  std::vector<std::size_t> list{G.identity()};
  H.member[G.identity()] = 1;
  std::vector<std::size_t> gens;
  for (const auto& g : generators(spec)) gens.push_back(G.index_of(g));
  // closure under right multiplication by the generators
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t g : gens) {
      const std::size_t x = G.multiply(list[i], g);
      if (!H.member[x]) {
        H.member[x] = 1;
        list.push_back(x);
      }
    }
  if (const u64 want = expected_order(spec); want && list.size() != want)
    throw Error(errc::construction_failure, spec.name() + ": generated " + std::to_string(list.size()) +
                                                " elements, expected " +
                                                std::to_string(want));

  if (spec.l >= 0) {
    const u32 M = static_cast<u32>(nt::ipow(spec.p, spec.r - spec.l));
    const auto scalars = square_roots_of_one(M);
    for (std::size_t x : list) {
      const MatModN m = G[x].reduce(M);
      const bool scalar = m.b == 0 && m.c == 0 && m.a == m.d &&
                          std::find(scalars.begin(), scalars.end(), m.a) != scalars.end();
      if (!scalar) H.member[x] = 0;
    }
  }
  H.order = static_cast<std::size_t>(std::count(H.member.begin(), H.member.end(), 1));
  return H;
}

Subgroup build_subgroup(const GroupTable& G, const CompositeSpec& spec) {
  if (spec.empty()) throw Error(errc::unsupported_spec, "empty intersection");
  for (std::size_t i = 0; i < spec.size(); ++i)
    for (std::size_t k = i + 1; k < spec.size(); ++k)
      if (spec[i].p == spec[k].p) throw Error(errc::unsupported_spec, "repeated prime in " + composite_name(spec));
  if (composite_level(spec) != G.modulus())
    throw Error(errc::unsupported_spec, composite_name(spec) + " does not live in PSL2(Z/" +
                                            std::to_string(G.modulus()) + ")");
  std::vector<GroupTable> parts;
  std::vector<Subgroup> subs;
  for (const auto& s : spec) {
    parts.emplace_back(static_cast<u32>(s.level()));
    subs.push_back(build_subgroup(parts.back(), s));
  }
  Subgroup H;
  H.member.assign(G.size(), 0);
  for (std::size_t x = 0; x < G.size(); ++x) {
    bool in = true;
    for (std::size_t i = 0; i < spec.size() && in; ++i) {
      const u32 M = static_cast<u32>(spec[i].level());
      in = subs[i].contains(parts[i].index_of(G[x].reduce(M)));
    }
    if (in) {
      H.member[x] = 1;
      ++H.order;
    }
  }
  return H;
}

MatModN g_of(i64 D, const BigInt& t, const BigInt& u, u32 N) {
  pell::require_discriminant(D);
  if (t * t - D * u * u != 4) throw Error(errc::domain_error, "(t, u) does not solve t^2 - D u^2 = 4");
  const int delta = static_cast<int>(D % 4);  // 0 or 1
  const BigInt a = (t + delta * u) / 2;
  const BigInt b = (D - delta) / 4 * u;
  const BigInt d = (t - delta * u) / 2;
  return MatModN{N, reduce_big(a, N), reduce_big(b, N), reduce_big(u, N), reduce_big(d, N)};
}

// ---------------------------------------------------------------------------

CosetAction::CosetAction(const GroupTable& G, const Subgroup& H) : G_(&G), H_(&H) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < G.size(); ++i)
    if (H.contains(i)) members.push_back(i);
  std::vector<char> labelled(G.size(), 0);
  for (std::size_t x = 0; x < G.size(); ++x) {
    if (labelled[x]) continue;
    reps_.push_back(x);
    rep_inverses_.push_back(G.inverse(x));
    for (std::size_t h : members) labelled[G.multiply(x, h)] = 1;
  }
}

u64 CosetAction::trace(std::size_t g) const {
  if (const auto it = memo_.find(g); it != memo_.end()) return it->second;
  u64 fixed = 0;
  for (std::size_t i = 0; i < reps_.size(); ++i)
    if (H_->contains(G_->multiply(G_->multiply(rep_inverses_[i], g), reps_[i]))) ++fixed;
  memo_.emplace(g, fixed);
  return fixed;
}

u64 induced_char_trace(const GroupTable& G, const Subgroup& H, const MatModN& g) {
  const std::size_t gi = G.index_of(g);
  u64 count = 0;
  for (std::size_t x = 0; x < G.size(); ++x)
    if (H.contains(G.multiply(G.multiply(G.inverse(x), gi), x))) ++count;
  return count / H.order;
}

// ---------------------------------------------------------------------------

PellClassData pell_class_data(i64 D, int j) {
  const auto disc = qf::make_discriminant(D);
  const auto sol = pell::pell_power(pell::pell_fundamental(D), j);
  return pell_class_data(D, disc.d, j, sol.t, sol.u);
}

PellClassData pell_class_data(i64 D, i64 d, int j, const BigInt& t, const BigInt& u) {
  PellClassData out;
  out.D = D;
  out.d = d;
  out.j = j;
  out.delta = static_cast<int>(D % 4);
  out.t = t;
  out.u = u;
  return out;
}

MEvaluator::MEvaluator(const SubgroupSpec& spec)
    : spec_(spec),
      G_(static_cast<u32>(spec.level())),
      H_(build_subgroup(G_, spec)),
      action_(G_, H_) {}

u64 MEvaluator::brute(const PellClassData& data) const {
  return action_.trace(G_.index_of(g_of(data.D, data.t, data.u, G_.modulus())));
}

u64 MEvaluator::operator()(const PellClassData& data) const {
  const auto cf = m_closed_form(spec_, data);
  return branch_flagged(spec_, cf.branch) ? brute(data) : cf.value;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<PellClassData>& sample_pool(i64 Dmax, int jmax) {
  static std::map<std::pair<i64, int>, std::vector<PellClassData>> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto& pool = cache[{Dmax, jmax}];
  if (!pool.empty()) return pool;
  for (i64 D = 5; D < Dmax; ++D) {
    if (!pell::is_discriminant(D)) continue;
    const auto disc = qf::make_discriminant(D);
    const auto fund = pell::pell_fundamental(D);
    for (int j = 1; j <= jmax; ++j) {
      const auto s = pell::pell_power(fund, j);
      pool.push_back(pell_class_data(D, disc.d, j, s.t, s.u));
    }
  }
  // fixed pseudo-random order so the first picks of a row are spread out
  std::vector<std::pair<std::uint64_t, std::size_t>> keys;
  for (std::size_t i = 0; i < pool.size(); ++i)
    keys.emplace_back(splitmix(static_cast<std::uint64_t>(pool[i].D) * 64 + pool[i].j), i);
  std::sort(keys.begin(), keys.end());
  std::vector<PellClassData> shuffled;
  for (const auto& [k, i] : keys) shuffled.push_back(pool[i]);
  pool = std::move(shuffled);
  return pool;
}

}  // namespace

std::vector<PellClassData> sample_pairs(const SubgroupSpec& spec, std::size_t count, i64 Dmax,
                                        int jmax) {
  const auto& pool = sample_pool(Dmax, jmax);
  std::vector<std::vector<const PellClassData*>> rows(static_cast<std::size_t>(branch_count(spec)));
  for (const auto& data : pool) rows[static_cast<std::size_t>(m_closed_form(spec, data).branch)].push_back(&data);
  std::vector<PellClassData> out;
  for (std::size_t depth = 0; out.size() < count; ++depth) {
    bool any = false;
    for (const auto& row : rows) {
      if (depth >= row.size() || out.size() >= count) continue;
      out.push_back(*row[depth]);
      any = true;
    }
    if (!any) break;
  }
  return out;
}

VerifyReport verify_m(const SubgroupSpec& spec, const std::vector<PellClassData>& samples) {
  const MEvaluator eval(spec);
  VerifyReport report;
  report.branches_hit.assign(static_cast<std::size_t>(branch_count(spec)), 0);
  for (const auto& data : samples) {
    VerifyLine line;
    line.spec = spec.name();
    line.D = data.D;
    line.j = data.j;
    const auto cf = m_closed_form(spec, data);
    line.branch = cf.branch;
    line.closed = cf.value;
    line.brute = eval.brute(data);
    line.agree = line.closed == line.brute;
    line.flagged = branch_flagged(spec, cf.branch);
    ++report.branches_hit[static_cast<std::size_t>(cf.branch)];
    if (line.agree) {
      ++report.agreements;
    } else {
      ++report.disagreements;
      if (line.flagged) ++report.flagged_disagreements;
    }
    report.lines.push_back(std::move(line));
  }
  return report;
}

}  // namespace geodesic::cg
