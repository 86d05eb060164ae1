#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "geodesic/pell.hpp"
#include "geodesic/qforms.hpp"

namespace geodesic::census {

using i64 = std::int64_t;
using u64 = std::uint64_t;

/// One pair (D, j) with eps(D)^j below the census threshold.
struct CensusRecord {
  u64 t = 0;
  u64 u = 0;
  i64 D = 0;
  i64 d = 0;
  int j = 1;
  int h = 0;  // 0 when class numbers were not requested
  double logEps = 0;  // j * log eps(D)

  friend bool operator==(const CensusRecord&, const CensusRecord&) = default;
};

using Filter = std::function<bool(i64 D, i64 d)>;

struct CensusOptions {
  Filter filter;                 // applied before class numbers are computed
  bool class_numbers = true;
  bool fundamental_only = false;  // keep j = 1 records only
  unsigned threads = 0;           // 0 picks the hardware concurrency
};

/// Largest trace the fixed-width path accepts; beyond it D no longer fits
/// in 63 bits.
inline constexpr u64 kMaxTrace = 3'000'000'000ULL;

/// Every (D, j) with eps(D)^j < xMax, ascending in t (ties by u descending,
/// i.e. D ascending). Records reach the sink in that order on the calling
/// thread, whatever the worker count.
void census_stream(u64 xMax, const CensusOptions& options,
                   const std::function<void(const CensusRecord&)>& sink);

std::vector<CensusRecord> census(u64 xMax, const CensusOptions& options = {});

/// j = 1 records with square-free companion d.
std::vector<CensusRecord> squarefree_census(u64 xMax, unsigned threads = 0);

struct DiscriminantEntry {
  qf::Discriminant disc;
  pell::PellSolution fund;
  int h = 0;
  double logEps = 0;
};

/// One entry per discriminant D < Dmax, ascending.
std::vector<DiscriminantEntry> census_by_discriminant(i64 Dmax);

// ---------------------------------------------------------------------------
// Disk cache

inline constexpr const char* kCacheMagic = "#geodesic-census";
inline constexpr int kCacheVersion = 1;

struct CensusFile {
  u64 xMax = 0;
  bool squarefree = false;  // written by a squarefree-filtered run
  std::vector<CensusRecord> records;
};

/// Writes the header, one `t,u,D,d,j,h` line per record and an `#end`
/// trailer carrying the record count and an FNV-1a digest of the lines.
void cache_write(const std::filesystem::path& path, const CensusFile& file);

/// Reads and rechecks every record: Pell identity, discriminant, companion,
/// solution index, trace order, trailer count and digest.
CensusFile cache_read(const std::filesystem::path& path);

/// Default file name inside a cache directory.
std::string cache_file_name(u64 xMax, bool squarefree);

/// Census with class numbers, read from dir when a file covering xMax
/// exists (larger caches are cut down by prefix) and written there
/// otherwise. An empty dir disables caching.
std::vector<CensusRecord> load_or_compute(const std::filesystem::path& dir, u64 xMax,
                                          bool squarefree, unsigned threads = 0);

/// Records of a larger census with eps^j < xMax.
std::vector<CensusRecord> prefix(const std::vector<CensusRecord>& records, u64 xMax);

}  // namespace geodesic::census
