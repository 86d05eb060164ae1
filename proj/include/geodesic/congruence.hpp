#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "geodesic/pell.hpp"

namespace geodesic::cg {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;
using pell::BigInt;

/// Largest modulus build_group accepts.
inline constexpr u32 kMaxModulus = 64;

/// 2x2 matrix over Z/NZ, row-major [[a, b], [c, d]].
struct MatModN {
  u32 N = 1;
  u32 a = 1, b = 0, c = 0, d = 1;

  MatModN operator*(const MatModN& o) const;
  MatModN inverse() const;  // adjugate, valid for det 1
  MatModN reduce(u32 M) const;  // entries mod M, for M | N
  u32 det() const;
  u32 code() const { return ((a * N + b) * N + c) * N + d; }
  friend bool operator==(const MatModN&, const MatModN&) = default;
};

/// {alpha mod N : alpha^2 = 1}.
std::vector<u32> square_roots_of_one(u32 N);

/// PSL2(Z/NZ): one canonical matrix per scalar class alpha * M with
/// alpha^2 = 1 (the lexicographically smallest).
class GroupTable {
 public:
  explicit GroupTable(u32 N);

  u32 modulus() const noexcept { return N_; }
  std::size_t size() const noexcept { return elements_.size(); }
  const std::vector<MatModN>& elements() const noexcept { return elements_; }
  const MatModN& operator[](std::size_t i) const { return elements_[i]; }

  MatModN canonical(const MatModN& m) const;
  std::size_t index_of(const MatModN& m) const;  // canonicalizes first
  std::size_t identity() const { return identity_; }
  std::size_t multiply(std::size_t i, std::size_t j) const;
  std::size_t inverse(std::size_t i) const;

 private:
  u32 N_;
  std::vector<u32> scalars_;
  std::vector<MatModN> elements_;
  std::unordered_map<u32, std::size_t> index_;
  std::size_t identity_ = 0;
};

/// [SL2(Z) : Gamma-hat(N)] = |PSL2(Z/NZ)|.
u64 principal_index(u64 N);

enum class Family { Hat, Split0, Plus, Minus, Three, Pow4 };

/// One of the level-p^r families, optionally intersected with
/// Gamma-hat(p^(r-l)).
struct SubgroupSpec {
  Family family = Family::Hat;
  u64 p = 2;
  int r = 1;
  int m = 0;     // Pow4 only
  int l = -1;    // intersect with Gamma-hat(p^(r-l)) when >= 0
  int root = 0;  // which square root of 17 / 1 + 4^m (Pow4 only)

  u64 level() const;
  std::string name() const;
  friend bool operator==(const SubgroupSpec&, const SubgroupSpec&) = default;
};

/// Intersection of per-prime subgroups with pairwise distinct primes.
using CompositeSpec = std::vector<SubgroupSpec>;

u64 composite_level(const CompositeSpec& spec);
std::string composite_name(const CompositeSpec& spec);

struct Subgroup {
  std::vector<char> member;  // indexed like GroupTable::elements()
  std::size_t order = 0;

  bool contains(std::size_t i) const { return member[i] != 0; }
};

/// The image of the congruence subgroup in G = PSL2(Z/p^rZ).
Subgroup build_subgroup(const GroupTable& G, const SubgroupSpec& spec);

/// Members are the elements whose reduction mod each p^r lies in the
/// corresponding per-prime subgroup.
Subgroup build_subgroup(const GroupTable& G, const CompositeSpec& spec);

/// g(D,j) = [[(t + delta u)/2, (D - delta^2) u / 4], [u, (t - delta u)/2]].
MatModN g_of(i64 D, const BigInt& t, const BigInt& u, u32 N);

/// Permutation action of G on the left cosets of H.
class CosetAction {
 public:
  CosetAction(const GroupTable& G, const Subgroup& H);

  std::size_t index() const noexcept { return reps_.size(); }

  /// Number of cosets xH with g x H = x H.
  u64 trace(std::size_t g) const;

 private:
  const GroupTable* G_;
  const Subgroup* H_;
  std::vector<std::size_t> reps_;
  std::vector<std::size_t> rep_inverses_;
  mutable std::unordered_map<std::size_t, u64> memo_;
};

/// Value of the character induced from the trivial representation of H at g,
/// counted as fixed cosets.
u64 induced_char_trace(const GroupTable& G, const Subgroup& H, const MatModN& g);

/// The arithmetic of one (D, j) that the closed forms look at.
struct PellClassData {
  i64 D = 0;
  i64 d = 0;
  int j = 1;
  int delta = 0;  // D = delta (mod 4)
  BigInt t;
  BigInt u;
};

PellClassData pell_class_data(i64 D, int j);
PellClassData pell_class_data(i64 D, i64 d, int j, const BigInt& t, const BigInt& u);

struct ClosedForm {
  u64 value = 0;
  int branch = 0;  // row of the table that fired; the last row is "otherwise"
};

/// Table lookup of M_Gamma(D, j) for the tabulated families.
ClosedForm m_closed_form(const SubgroupSpec& spec, const PellClassData& data);

/// Human-readable condition of a table row.
std::string branch_label(const SubgroupSpec& spec, int branch);

/// Number of rows of the family's table (including "otherwise").
int branch_count(const SubgroupSpec& spec);

/// Rows whose printed values disagree with the coset count; the coset count
/// is used there.
bool branch_flagged(const SubgroupSpec& spec, int branch);

/// Product of per-prime closed forms.
u64 m_composite(const CompositeSpec& spec, const PellClassData& data);

/// Closed form where the table is sound, coset count on flagged rows.
class MEvaluator {
 public:
  explicit MEvaluator(const SubgroupSpec& spec);

  u64 operator()(const PellClassData& data) const;
  u64 brute(const PellClassData& data) const;
  const SubgroupSpec& spec() const noexcept { return spec_; }

 private:
  SubgroupSpec spec_;
  GroupTable G_;
  Subgroup H_;
  CosetAction action_;
};

struct VerifyLine {
  std::string spec;
  i64 D = 0;
  int j = 0;
  int branch = 0;
  u64 closed = 0;
  u64 brute = 0;
  bool agree = true;
  bool flagged = false;
};

struct VerifyReport {
  std::vector<VerifyLine> lines;
  std::size_t agreements = 0;
  std::size_t disagreements = 0;
  std::size_t flagged_disagreements = 0;  // on rows marked as printing errors
  std::vector<int> branches_hit;          // per row: number of samples
};

/// Samples covering every reachable row, round-robin over rows, drawn from
/// discriminants below Dmax and powers j <= jmax.
std::vector<PellClassData> sample_pairs(const SubgroupSpec& spec, std::size_t count,
                                        i64 Dmax = 3000, int jmax = 6);

VerifyReport verify_m(const SubgroupSpec& spec, const std::vector<PellClassData>& samples);

/// Every family Lemma 2.2 tabulates at level p^r, with each admissible l.
std::vector<SubgroupSpec> tabulated_families(u64 p, int r);

}  // namespace geodesic::cg
