#include "puma/seg_state.hpp"

#include <algorithm>
#include <array>

#include "puma/error.hpp"
#include "puma/parallel.hpp"

namespace puma {

void count_pairs(const std::vector<UnitId>& row, PairCounts& counts) {
  for (std::size_t i = 1; i < row.size(); ++i) ++counts[UnitPair{row[i - 1], row[i]}.key()];
}

std::size_t merge_row(std::vector<UnitId>& row, UnitPair pair, UnitId merged) {
  std::size_t out = 0;
  std::size_t replaced = 0;
  for (std::size_t i = 0; i < row.size();) {
    if (i + 1 < row.size() && row[i] == pair.left && row[i + 1] == pair.right) {
      row[out++] = merged;
      i += 2;
      ++replaced;
    } else {
      row[out++] = row[i++];
    }
  }
  row.resize(out);
  return replaced;
}

SegState SegState::build(const Corpus& corpus, const Vocabulary& vocab, int threads) {
  std::array<std::optional<UnitId>, 256> char_ids{};
  for (const auto& u : vocab.units()) {
    if (u.string.size() == 1) char_ids[static_cast<unsigned char>(u.string[0])] = u.id;
  }
  std::vector<std::vector<UnitId>> rows(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto& rec = corpus.records[r];
      auto& row = rows[r];
      row.reserve(rec.seq.size());
      for (std::size_t i = 0; i < rec.seq.size(); ++i) {
        const auto id = char_ids[static_cast<unsigned char>(rec.seq[i])];
        if (!id) {
          throw LookupError("character '" + std::string(1, rec.seq[i]) + "' of sequence '" + rec.id +
                            "' (position " + std::to_string(i + 1) + ") is not in the vocabulary");
        }
        row.push_back(*id);
      }
      for (const auto& step : vocab.merges()) merge_row(row, step.pair, step.result);
    }
  });
  return from_rows(std::move(rows), vocab, threads);
}

SegState SegState::from_rows(std::vector<std::vector<UnitId>> rows, const Vocabulary& vocab, int threads) {
  SegState s;
  s.vocab_ = &vocab;
  s.rows_ = std::move(rows);
  for (const auto& row : s.rows_) {
    for (UnitId id : row) vocab.unit(id);
  }
  s.rebuild_index(threads);
  return s;
}

void SegState::rebuild_index(int threads) {
  const std::size_t n = rows_.size();
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
  std::vector<PairCounts> partial(static_cast<std::size_t>(workers));
  const std::size_t chunk = (n + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      for (std::size_t r = begin; r < end; ++r) count_pairs(rows_[r], partial[w]);
    }
  });
  counts_.clear();
  for (const auto& p : partial) {
    for (const auto& [k, c] : p) counts_[k] += c;
  }
  where_.clear();
  for (std::uint32_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    for (std::size_t i = 1; i < row.size(); ++i) {
      auto& list = where_[UnitPair{row[i - 1], row[i]}.key()];
      if (list.empty() || list.back() != r) list.push_back(r);
    }
  }
  heap_.clear();
  heap_.reserve(counts_.size());
  for (const auto& [k, c] : counts_) heap_.push_back({c, UnitPair::from_key(k)});
  std::make_heap(heap_.begin(), heap_.end(), [this](const HeapEntry& a, const HeapEntry& b) { return heap_less(a, b); });
}

std::int64_t SegState::count(UnitPair p) const {
  auto it = counts_.find(p.key());
  return it == counts_.end() ? 0 : it->second;
}

bool SegState::heap_less(const HeapEntry& a, const HeapEntry& b) const {
  // true when a ranks below b
  if (a.count != b.count) return a.count < b.count;
  if (a.pair == b.pair) return false;
  const auto& al = vocab_->str(a.pair.left);
  const auto& bl = vocab_->str(b.pair.left);
  if (al != bl) return al > bl;
  return vocab_->str(a.pair.right) > vocab_->str(b.pair.right);
}

void SegState::heap_push(HeapEntry e) {
  heap_.push_back(e);
  std::push_heap(heap_.begin(), heap_.end(), [this](const HeapEntry& a, const HeapEntry& b) { return heap_less(a, b); });
}

bool SegState::discard_stale_top() {
  auto less = [this](const HeapEntry& a, const HeapEntry& b) { return heap_less(a, b); };
  while (!heap_.empty()) {
    const HeapEntry top = heap_.front();
    const std::int64_t live = count(top.pair);
    if (live == top.count && live > 0) return true;
    std::pop_heap(heap_.begin(), heap_.end(), less);
    heap_.pop_back();
    if (live > 0) heap_push({live, top.pair});
  }
  return false;
}

std::optional<PairFrequency> SegState::top() {
  if (!discard_stale_top()) return std::nullopt;
  return PairFrequency{heap_.front().pair, heap_.front().count};
}

std::optional<PairFrequency> SegState::pop_max() {
  if (!discard_stale_top()) return std::nullopt;
  const HeapEntry top = heap_.front();
  std::pop_heap(heap_.begin(), heap_.end(), [this](const HeapEntry& a, const HeapEntry& b) { return heap_less(a, b); });
  heap_.pop_back();
  return PairFrequency{top.pair, top.count};
}

std::int64_t SegState::apply_merge(UnitPair pair, UnitId merged, int threads) {
  auto wit = where_.find(pair.key());
  if (wit == where_.end()) return 0;
  std::vector<std::uint32_t> targets = std::move(wit->second);
  where_.erase(wit);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  // Rewrite rows independently, then fold count deltas in row order so the
  // outcome does not depend on the worker count.
  std::vector<std::vector<UnitId>> rewritten(targets.size());
  std::vector<std::size_t> replaced(targets.size(), 0);
  parallel_for(targets.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      rewritten[t] = rows_[targets[t]];
      replaced[t] = merge_row(rewritten[t], pair, merged);
    }
  });

  PairCounts delta;
  std::int64_t total = 0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (replaced[t] == 0) continue;
    total += static_cast<std::int64_t>(replaced[t]);
    const std::uint32_t r = targets[t];
    auto& row = rows_[r];
    for (std::size_t i = 1; i < row.size(); ++i) --delta[UnitPair{row[i - 1], row[i]}.key()];
    row = std::move(rewritten[t]);
    for (std::size_t i = 1; i < row.size(); ++i) {
      const std::uint64_t k = UnitPair{row[i - 1], row[i]}.key();
      ++delta[k];
      if (row[i - 1] == merged || row[i] == merged) {
        auto& list = where_[k];
        if (list.empty() || list.back() != r) list.push_back(r);
      }
    }
  }

  std::vector<std::uint64_t> raised;
  for (const auto& [k, d] : delta) {
    if (d == 0) continue;
    auto it = counts_.find(k);
    const std::int64_t now = (it == counts_.end() ? 0 : it->second) + d;
    if (now < 0) throw ValidationError("pair count underflow while merging");
    if (now == 0) {
      if (it != counts_.end()) counts_.erase(it);
      where_.erase(k);
    } else if (it == counts_.end()) {
      counts_.emplace(k, now);
    } else {
      it->second = now;
    }
    if (d > 0) raised.push_back(k);
  }
  std::sort(raised.begin(), raised.end());
  for (auto k : raised) heap_push({counts_.at(k), UnitPair::from_key(k)});
  return total;
}

PairCounts SegState::recount() const {
  PairCounts out;
  for (const auto& row : rows_) count_pairs(row, out);
  return out;
}

}  // namespace puma
