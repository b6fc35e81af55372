#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/types.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

using PairCounts = std::unordered_map<std::uint64_t, std::int64_t>;  // UnitPair::key() -> count

struct PairFrequency {
  UnitPair pair;
  std::int64_t count = 0;
};

/// Segmented corpus: one row of unit ids per sequence plus the adjacent-pair
/// frequency index and a lazily revalidated max-heap over it.
///
/// The heap orders by count, then by (left string, right string) ascending,
/// read from the attached vocabulary. The vocabulary must outlive the state
/// and may grow; unit strings are never modified.
class SegState {
 public:
  /// Character-level segmentation followed by a replay of the vocabulary's
  /// merge log. Throws LookupError for characters missing from `vocab`.
  static SegState build(const Corpus& corpus, const Vocabulary& vocab, int threads = 1);

  /// Takes pre-segmented rows as they are.
  static SegState from_rows(std::vector<std::vector<UnitId>> rows, const Vocabulary& vocab, int threads = 1);

  void attach(const Vocabulary& vocab) { vocab_ = &vocab; }

  const std::vector<std::vector<UnitId>>& rows() const { return rows_; }
  const PairCounts& pair_counts() const { return counts_; }
  std::int64_t count(UnitPair p) const;

  /// Replaces every occurrence of `pair` by `merged`, left to right and
  /// non-overlapping within each row. Counts, the row index and the heap are
  /// updated. Returns the number of occurrences replaced.
  std::int64_t apply_merge(UnitPair pair, UnitId merged, int threads = 1);

  /// Pops the live pair with the highest count (ties: smallest left string,
  /// then smallest right string). Stale heap entries are discarded or
  /// re-pushed with their live count. Returns nullopt when no pair remains.
  std::optional<PairFrequency> pop_max();

  /// Peek without removing; same ordering and staleness handling as pop_max.
  std::optional<PairFrequency> top();

  /// Full recount of adjacent pairs over the rows.
  PairCounts recount() const;
  bool counts_consistent() const { return recount() == counts_; }

 private:
  struct HeapEntry {
    std::int64_t count;
    UnitPair pair;
  };

  void rebuild_index(int threads);
  bool heap_less(const HeapEntry& a, const HeapEntry& b) const;
  void heap_push(HeapEntry e);
  bool discard_stale_top();

  const Vocabulary* vocab_ = nullptr;
  std::vector<std::vector<UnitId>> rows_;
  PairCounts counts_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> where_;  // rows that may hold the pair
  std::vector<HeapEntry> heap_;
};

/// Adds every adjacent pair of `row` to `counts`.
void count_pairs(const std::vector<UnitId>& row, PairCounts& counts);

/// Left-to-right non-overlapping replacement of `pair` by `merged` within a
/// single row. Returns the number of replacements.
std::size_t merge_row(std::vector<UnitId>& row, UnitPair pair, UnitId merged);

}  // namespace puma
