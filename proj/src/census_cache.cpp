#include <charconv>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include "geodesic/census.hpp"
#include "geodesic/error.hpp"
#include "geodesic/numtheory.hpp"

namespace geodesic::census {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv1a(std::uint64_t& h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
}

std::string format_line(const CensusRecord& r) {
  return std::to_string(r.t) + ',' + std::to_string(r.u) + ',' + std::to_string(r.D) + ',' +
         std::to_string(r.d) + ',' + std::to_string(r.j) + ',' + std::to_string(r.h) + '\n';
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void corrupt(const fs::path& path, std::size_t line, const std::string& why) {
  throw Error(errc::corrupt_cache, path.string() + ":" + std::to_string(line) + ": " + why);
}

template <class T>
bool parse_int(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

void check_record(const CensusRecord& r, const fs::path& path, std::size_t line) {
  using nt::u128;
  if (r.t < 3 || r.u < 1 || r.j < 1 || r.h < 1) corrupt(path, line, "field out of range");
  if (!pell::is_discriminant(r.D)) corrupt(path, line, "D is not a discriminant");
  if (static_cast<u128>(r.t) * r.t - 4 != static_cast<u128>(r.D) * r.u * r.u)
    corrupt(path, line, "t^2 - D u^2 != 4");
  const auto sf = nt::squarefree_core(static_cast<u128>(r.D));
  const i64 d = sf.core % 4 == 1 ? r.D : r.D / 4;
  if (d != r.d) corrupt(path, line, "companion d does not match D");
  const auto fund = pell::pell_fundamental_bounded(r.D, r.u);
  if (!fund) corrupt(path, line, "no fundamental solution below u");
  const auto sol = pell::pell_power(pell::PellSolution{r.D, 1, fund->t, fund->u}, r.j);
  if (sol.t != r.t || sol.u != r.u) corrupt(path, line, "(t, u) is not the j-th solution");
}

}  // namespace

std::string cache_file_name(u64 xMax, bool squarefree) {
  return std::string("census-") + (squarefree ? "squarefree-" : "all-") + std::to_string(xMax) +
         ".csv";
}

void cache_write(const fs::path& path, const CensusFile& file) {
  std::string body;
  std::uint64_t digest = kFnvOffset;
  for (const auto& r : file.records) {
    const std::string line = format_line(r);
    fnv1a(digest, line);
    body += line;
  }
  std::string header = std::string(kCacheMagic) + " v" + std::to_string(kCacheVersion) +
                       " xmax=" + std::to_string(file.xMax);
  if (file.squarefree) header += " filter=squarefree";

  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(errc::io_error, "cannot open " + tmp.string() + " for writing");
    out << header << '\n'
        << body << "#end count=" << file.records.size() << " fnv1a=" << hex64(digest) << '\n';
    out.close();
    if (!out) throw Error(errc::io_error, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(errc::io_error, "cannot rename to " + path.string() + ": " + ec.message());
}

CensusFile cache_read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot open " + path.string());

  CensusFile file;
  std::string line;
  if (!std::getline(in, line)) corrupt(path, 1, "missing header");
  static const std::regex version_re(R"(#geodesic-census v(\d+)( .*)?)");
  static const std::regex header_re(R"( xmax=(\d+)( filter=squarefree)?)");
  std::smatch m;
  if (!std::regex_match(line, m, version_re)) corrupt(path, 1, "not a census cache");
  if (m[1].str() != std::to_string(kCacheVersion))
    throw Error(errc::version_mismatch, path.string() + ": " + line);
  const std::string rest = m[2].str();
  if (!std::regex_match(rest, m, header_re)) corrupt(path, 1, "malformed header");
  if (!parse_int(m[1].str(), file.xMax)) corrupt(path, 1, "bad xmax");
  file.squarefree = m[2].matched;

  std::uint64_t digest = kFnvOffset;
  std::size_t lineno = 1;
  bool ended = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (ended) corrupt(path, lineno, "data after trailer");
    if (line.rfind("#end ", 0) == 0) {
      static const std::regex trailer_re(R"(#end count=(\d+) fnv1a=([0-9a-f]{16}))");
      if (!std::regex_match(line, m, trailer_re)) corrupt(path, lineno, "malformed trailer");
      if (std::stoull(m[1].str()) != file.records.size()) corrupt(path, lineno, "record count mismatch");
      if (m[2].str() != hex64(digest)) corrupt(path, lineno, "checksum mismatch");
      ended = true;
      continue;
    }
    std::string_view fields[6];
    std::size_t start = 0;
    int k = 0;
    for (; k < 6; ++k) {
      const std::size_t comma = line.find(',', start);
      if (k < 5 && comma == std::string::npos) break;
      fields[k] = std::string_view(line).substr(start, k < 5 ? comma - start : std::string::npos);
      start = comma + 1;
    }
    CensusRecord r;
    if (k != 6 || !parse_int(fields[0], r.t) || !parse_int(fields[1], r.u) ||
        !parse_int(fields[2], r.D) || !parse_int(fields[3], r.d) || !parse_int(fields[4], r.j) ||
        !parse_int(fields[5], r.h))
      corrupt(path, lineno, "malformed record");
    check_record(r, path, lineno);
    if (!pell::epsilon_below(r.t, r.u, r.D, file.xMax)) corrupt(path, lineno, "record beyond xmax");
    if (!file.records.empty()) {
      const auto& prev = file.records.back();
      if (prev.t > r.t || (prev.t == r.t && prev.D >= r.D)) corrupt(path, lineno, "records out of order");
    }
    if (file.squarefree && (r.j != 1 || !nt::is_squarefree(static_cast<u64>(r.d))))
      corrupt(path, lineno, "record violates the squarefree filter");
    r.logEps = pell::log_epsilon_from_trace(static_cast<double>(r.t));
    fnv1a(digest, line + '\n');
    file.records.push_back(r);
  }
  if (!ended) corrupt(path, lineno, "missing trailer (truncated file?)");
  return file;
}

std::vector<CensusRecord> load_or_compute(const fs::path& dir, u64 xMax, bool squarefree,
                                          unsigned threads) {
  auto compute = [&] {
    return squarefree ? squarefree_census(xMax, threads)
                      : [&] {
                          CensusOptions options;
                          options.threads = threads;
                          return census(xMax, options);
                        }();
  };
  if (dir.empty()) return compute();

  // smallest usable cache: same kind, or an unfiltered one cut down
  static const std::regex name_re(R"(census-(all|squarefree)-(\d+)\.csv)");
  fs::path best;
  u64 best_x = 0;
  bool best_sf = false;
  std::error_code ec;
  if (fs::is_directory(dir, ec)) {
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      std::smatch m;
      const std::string name = entry.path().filename().string();
      if (!std::regex_match(name, m, name_re)) continue;
      const bool sf = m[1].str() == "squarefree";
      if (sf && !squarefree) continue;
      u64 x = 0;
      if (!parse_int(m[2].str(), x) || x < xMax) continue;
      if (best.empty() || x < best_x || (x == best_x && sf && !best_sf)) {
        best = entry.path();
        best_x = x;
        best_sf = sf;
      }
    }
  }

  if (!best.empty()) {
    auto file = cache_read(best);
    auto records = prefix(file.records, xMax);
    if (squarefree && !file.squarefree)
      std::erase_if(records, [](const CensusRecord& r) {
        return r.j != 1 || !nt::is_squarefree(static_cast<u64>(r.d));
      });
    return records;
  }

  auto records = compute();
  fs::create_directories(dir, ec);
  if (ec) throw Error(errc::io_error, "cannot create " + dir.string() + ": " + ec.message());
  cache_write(dir / cache_file_name(xMax, squarefree), CensusFile{xMax, squarefree, records});
  return records;
}

}  // namespace geodesic::census
