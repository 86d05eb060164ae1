// geodesic-cli: census generation, Lemma-table verification and statistics.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "geodesic/census.hpp"
#include "geodesic/congruence.hpp"
#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"
#include "geodesic/stats.hpp"

namespace fs = std::filesystem;
using namespace geodesic;
using census::CensusRecord;
using i64 = std::int64_t;
using u64 = std::uint64_t;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitDisagreement = 3;
constexpr int kExitIo = 4;

struct Cell {
  std::string text;
  bool number = true;
};

Cell num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return {buf, true};
}
Cell num(long long v) { return {std::to_string(v), true}; }
Cell num(unsigned long long v) { return {std::to_string(v), true}; }
Cell num(int v) { return {std::to_string(v), true}; }
Cell num(unsigned long v) { return {std::to_string(v), true}; }
Cell num(long v) { return {std::to_string(v), true}; }
Cell str(std::string s) { return {std::move(s), false}; }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json extra = nlohmann::json::object();
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t i = 0; i < r.size(); ++i)
        row[t.columns[i]] = r[i].number ? nlohmann::json::parse(r[i].text) : nlohmann::json(r[i].text);
      rows.push_back(row);
    }
    nlohmann::json doc = t.extra;
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
    return os.str();
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i].text);
    os << '\n';
  }
  return os.str();
}

struct Common {
  std::string format = "csv";
  std::string out;
  std::string cache;
  unsigned threads = 0;

  fs::path cache_dir() const {
    if (!cache.empty()) return cache;
    if (const char* env = std::getenv("GEODESIC_CACHE_DIR"); env && *env) return env;
    return {};
  }

  void emit(const Table& t) const {
    const std::string text = render(t, format);
    if (out.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(errc::io_error, "cannot open " + out);
    f << text;
    if (!f.flush()) throw Error(errc::io_error, "write failed: " + out);
  }
};

void add_common(CLI::App* sub, Common& c, bool with_cache = true) {
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "write the table here instead of stdout");
  sub->add_option("--threads", c.threads, "census workers (0 = all cores)");
  if (with_cache)
    sub->add_option("--cache", c.cache, "cache directory (default $GEODESIC_CACHE_DIR, else none)");
}

// Powers of ten up to xmax, then xmax itself.
std::vector<u64> checkpoints(u64 xmax) {
  std::vector<u64> out;
  for (u64 x = 10; x <= xmax; x *= 10) out.push_back(x);
  if (out.empty() || out.back() != xmax) out.push_back(xmax);
  return out;
}

std::vector<CensusRecord> records_for(const Common& c, u64 xmax, bool squarefree) {
  const fs::path dir = c.cache_dir();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
  }
  return census::load_or_compute(dir, xmax, squarefree, c.threads);
}

void check_xmax(u64 x) {
  if (x < 3) throw Error(errc::domain_error, "--xmax must be at least 3");
}

// census ---------------------------------------------------------------------

struct CensusArgs {
  Common common;
  u64 xmax = 0;
  std::string filter = "all";
};

int cmd_census(const CensusArgs& a) {
  const bool sf = a.filter == "squarefree";
  fs::path dir = a.common.cache_dir();
  if (dir.empty()) dir = "geodesic-cache";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(errc::io_error, "cannot create " + dir.string() + ": " + ec.message());

  std::vector<CensusRecord> records;
  if (a.xmax >= 3) {
    records = census::load_or_compute(dir, a.xmax, sf, a.common.threads);
  }
  const fs::path path = dir / census::cache_file_name(a.xmax, sf);
  if (!fs::exists(path)) census::cache_write(path, census::CensusFile{a.xmax, sf, records});

  long long sumH = 0;
  u64 maxT = 0;
  for (const auto& r : records) {
    sumH += r.h;
    maxT = std::max(maxT, r.t);
  }
  Table t;
  t.columns = {"xmax", "filter", "count", "sum_h", "max_t", "cache"};
  t.rows.push_back({num(static_cast<unsigned long long>(a.xmax)), str(a.filter),
                    num(static_cast<unsigned long long>(records.size())), num(sumH),
                    num(static_cast<unsigned long long>(maxT)), str(path.string())});
  a.common.emit(t);
  return 0;
}

// mu -------------------------------------------------------------------------

struct MuArgs {
  Common common;
  std::string cond;
  u64 xmax = 10000;
};

int cmd_mu(const MuArgs& a) {
  const auto c = stats::Condition::parse(a.cond);
  check_xmax(a.xmax);
  const auto mu = stats::mu_theoretical(c);
  const double muD = stats::to_double(mu);
  const auto records = records_for(a.common, a.xmax, false);

  Table t;
  t.columns = {"x", "numerator", "denominator", "estimate", "theoretical", "theoretical_exact", "abs_error"};
  for (u64 x : checkpoints(a.xmax)) {
    if (x < 3) continue;
    const auto e = stats::mu_estimate(c, records, x);
    t.rows.push_back({num(static_cast<unsigned long long>(x)), num(e.numerator), num(e.denominator),
                      num(e.value), num(muD), str(stats::to_string(mu)), num(std::abs(e.value - muD))});
  }
  t.extra["condition"] = c.str();
  a.common.emit(t);
  return 0;
}

// verify-m -------------------------------------------------------------------

struct VerifyArgs {
  Common common;
  u64 p = 2;
  int r = 1;
  std::size_t samples = 200;
};

int cmd_verify_m(const VerifyArgs& a) {
  if (a.r < 1) throw Error(errc::domain_error, "--r must be at least 1");
  u64 level = 1;
  for (int i = 0; i < a.r; ++i) {
    level *= a.p;
    if (level > cg::kMaxModulus) throw Error(errc::modulus_too_large, "level exceeds 64");
  }
  const auto families = cg::tabulated_families(a.p, a.r);
  if (families.empty()) throw Error(errc::unsupported_spec, "no tabulated family at this level");

  Table t;
  t.columns = {"family", "samples", "agree", "disagree", "flagged", "unflagged", "rows", "rows_hit",
               "unreached_rows"};
  nlohmann::json log = nlohmann::json::array();
  std::size_t unflagged_total = 0;
  for (const auto& s : families) {
    const auto rep = cg::verify_m(s, cg::sample_pairs(s, a.samples));
    const std::size_t unflagged = rep.disagreements - rep.flagged_disagreements;
    unflagged_total += unflagged;
    int hit = 0;
    std::string unreached;
    for (std::size_t b = 0; b < rep.branches_hit.size(); ++b) {
      if (rep.branches_hit[b]) {
        ++hit;
      } else {
        if (!unreached.empty()) unreached += "; ";
        unreached += cg::branch_label(s, static_cast<int>(b));
      }
    }
    t.rows.push_back({str(s.name()), num(static_cast<unsigned long long>(rep.lines.size())),
                      num(static_cast<unsigned long long>(rep.agreements)),
                      num(static_cast<unsigned long long>(rep.disagreements)),
                      num(static_cast<unsigned long long>(rep.flagged_disagreements)),
                      num(static_cast<unsigned long long>(unflagged)),
                      num(static_cast<int>(rep.branches_hit.size())), num(hit), str(unreached)});
    for (const auto& l : rep.lines) {
      if (l.agree) continue;
      log.push_back({{"family", l.spec},
                     {"D", l.D},
                     {"j", l.j},
                     {"row", cg::branch_label(s, l.branch)},
                     {"table", l.closed},
                     {"cosets", l.brute},
                     {"flagged", l.flagged}});
    }
  }
  // disagreement log goes to stderr so the table stays machine-readable
  for (const auto& e : log)
    std::cerr << (e["flagged"].get<bool>() ? "flagged " : "UNFLAGGED ") << e["family"].get<std::string>()
              << " D=" << e["D"] << " j=" << e["j"] << " row=\"" << e["row"].get<std::string>()
              << "\" table=" << e["table"] << " cosets=" << e["cosets"] << '\n';
  t.extra["disagreements"] = log;
  a.common.emit(t);
  return unflagged_total ? kExitDisagreement : 0;
}

// alpha ----------------------------------------------------------------------

struct AlphaArgs {
  Common common;
  std::vector<u64> primes{3, 5, 7, 11};
  u64 xmax = 10000;
};

int cmd_alpha(const AlphaArgs& a) {
  check_xmax(a.xmax);
  for (u64 p : a.primes)
    if (p < 3 || !nt::is_prime(p)) throw Error(errc::domain_error, "--p must be an odd prime");
  const auto records = records_for(a.common, a.xmax, true);
  Table t;
  t.columns = {"x", "p", "divisible", "total", "alpha"};
  for (u64 x : checkpoints(a.xmax))
    for (u64 p : a.primes) {
      const auto r = stats::alpha_p(p, records, x);
      t.rows.push_back({num(static_cast<unsigned long long>(x)), num(static_cast<unsigned long long>(p)),
                        num(static_cast<unsigned long long>(r.divisible)),
                        num(static_cast<unsigned long long>(r.total)), num(r.value)});
    }
  a.common.emit(t);
  return 0;
}

// h1 -------------------------------------------------------------------------

struct H1Args {
  Common common;
  u64 xmax = 1000;
};

int cmd_h1(const H1Args& a) {
  check_xmax(a.xmax);
  const auto entries = stats::h1_census(a.xmax, a.common.threads);
  Table t;
  t.columns = {"rank", "d", "t", "decade"};
  int rank = 0;
  nlohmann::json counts = nlohmann::json::object();
  for (u64 x : checkpoints(a.xmax)) counts[std::to_string(x)] = 0;
  for (const auto& e : entries) {
    u64 decade = 0;
    for (u64 x : checkpoints(a.xmax))
      if (e.t <= x) {
        if (!decade) decade = x;
        counts[std::to_string(x)] = counts[std::to_string(x)].get<int>() + 1;
      }
    t.rows.push_back({num(++rank), num(static_cast<long long>(e.d)), num(static_cast<unsigned long long>(e.t)),
                      num(static_cast<unsigned long long>(decade))});
  }
  t.extra["counts"] = counts;
  a.common.emit(t);
  return 0;
}

// sums -----------------------------------------------------------------------

struct SumsArgs {
  Common common;
  std::string mode = "sarnak";
  u64 xmax = 10000;
};

int cmd_sums(const SumsArgs& a) {
  check_xmax(a.xmax);
  Table t;
  t.columns = {"x", "sum", "reference", "ratio"};
  if (a.mode == "sarnak") {
    const auto records = records_for(a.common, a.xmax, false);
    for (u64 x : checkpoints(a.xmax)) {
      const auto s = stats::sarnak_ratio(records, x);
      t.rows.push_back({num(static_cast<unsigned long long>(x)), num(s.sumH),
                        num(stats::li(double(x) * double(x))), num(s.ratio)});
    }
    t.extra["reference"] = "li(x^2)";
  } else {
    const auto entries = census::census_by_discriminant(static_cast<i64>(a.xmax));
    for (u64 x : checkpoints(a.xmax)) {
      const auto s = stats::siegel_ratio(entries, static_cast<i64>(x));
      t.rows.push_back({num(static_cast<unsigned long long>(x)), num(s.sum),
                        num(stats::siegel_constant() * std::pow(double(x), 1.5)), num(s.ratio)});
    }
    t.extra["reference"] = "pi^2/(18 zeta(3)) x^(3/2)";
  }
  t.extra["mode"] = a.mode;
  a.common.emit(t);
  return 0;
}

// beta (exploratory) ---------------------------------------------------------

struct BetaArgs {
  Common common;
  std::string cond;
  u64 xmax = 10000;
};

int cmd_beta(const BetaArgs& a) {
  const auto c = stats::Condition::parse(a.cond);
  check_xmax(a.xmax);
  const auto entries = census::census_by_discriminant(static_cast<i64>(a.xmax));
  Table t;
  t.columns = {"x", "sum", "all", "beta", "share"};
  for (u64 x : checkpoints(a.xmax)) {
    const auto b = stats::beta(c, entries, static_cast<i64>(x));
    t.rows.push_back({num(static_cast<unsigned long long>(x)), num(b.sum), num(b.all), num(b.beta),
                      num(b.share)});
  }
  t.extra["condition"] = c.str();
  a.common.emit(t);
  return 0;
}

int exit_code(errc code) {
  switch (code) {
    case errc::io_error:
    case errc::corrupt_cache:
    case errc::version_mismatch:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolic class census and congruence-subgroup statistics"};
  app.require_subcommand(1);

  CensusArgs census_args;
  auto* census_cmd = app.add_subcommand("census", "enumerate (D, j) with eps(D)^j < xmax and cache them");
  census_cmd->add_option("--xmax", census_args.xmax)->required();
  census_cmd->add_option("--filter", census_args.filter)->check(CLI::IsMember({"all", "squarefree"}));
  add_common(census_cmd, census_args.common);

  MuArgs mu_args;
  auto* mu_cmd = app.add_subcommand("mu", "density of a condition on d against its limit");
  mu_cmd->add_option("--cond", mu_args.cond, "e.g. \"3|d and (d/5)=-1\"")->required();
  mu_cmd->add_option("--xmax", mu_args.xmax);
  add_common(mu_cmd, mu_args.common);

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify-m", "closed-form multiplicities against coset counts");
  verify_cmd->add_option("--p", verify_args.p)->required();
  verify_cmd->add_option("--r", verify_args.r)->required();
  verify_cmd->add_option("--samples", verify_args.samples);
  add_common(verify_cmd, verify_args.common, false);

  AlphaArgs alpha_args;
  auto* alpha_cmd = app.add_subcommand("alpha", "share of square-free d with p | h(d)");
  alpha_cmd->add_option("--p", alpha_args.primes)->delimiter(',');
  alpha_cmd->add_option("--xmax", alpha_args.xmax);
  add_common(alpha_cmd, alpha_args.common);

  H1Args h1_args;
  auto* h1_cmd = app.add_subcommand("h1", "primes d with class number one, ordered by eps");
  h1_cmd->add_option("--xmax", h1_args.xmax);
  add_common(h1_cmd, h1_args.common, false);

  SumsArgs sums_args;
  auto* sums_cmd = app.add_subcommand("sums", "class number sums against their asymptotics");
  sums_cmd->add_option("--mode", sums_args.mode)->check(CLI::IsMember({"sarnak", "siegel"}));
  sums_cmd->add_option("--xmax", sums_args.xmax);
  add_common(sums_cmd, sums_args.common);

  BetaArgs beta_args;
  auto* beta_cmd = app.add_subcommand("beta", "exploratory: D-ordered sums of h log eps under a condition");
  beta_cmd->add_option("--cond", beta_args.cond)->required();
  beta_cmd->add_option("--xmax", beta_args.xmax);
  add_common(beta_cmd, beta_args.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*census_cmd) return cmd_census(census_args);
    if (*mu_cmd) return cmd_mu(mu_args);
    if (*verify_cmd) return cmd_verify_m(verify_args);
    if (*alpha_cmd) return cmd_alpha(alpha_args);
    if (*h1_cmd) return cmd_h1(h1_args);
    if (*sums_cmd) return cmd_sums(sums_args);
    if (*beta_cmd) return cmd_beta(beta_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}
