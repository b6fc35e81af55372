#include "puma/segmenter.hpp"

#include <algorithm>
#include <functional>
#include <queue>

#include "puma/error.hpp"
#include "puma/parallel.hpp"

namespace puma {

Segmenter::Segmenter(const Vocabulary& vocab) : vocab_(vocab) {
  for (const auto& u : vocab.units()) {
    if (u.string.size() == 1) char_ids_[static_cast<unsigned char>(u.string[0])] = u.id;
  }
  const auto& merges = vocab.merges();
  for (std::uint32_t r = 0; r < merges.size(); ++r) ranks_[merges[r].pair.key()].push_back(r);
}

std::optional<std::uint32_t> Segmenter::next_rank(UnitPair pair, std::int64_t after) const {
  auto it = ranks_.find(pair.key());
  if (it == ranks_.end()) return std::nullopt;
  const auto& list = it->second;
  auto pos = std::upper_bound(list.begin(), list.end(), after,
                              [](std::int64_t a, std::uint32_t r) { return a < static_cast<std::int64_t>(r); });
  if (pos == list.end()) return std::nullopt;
  return *pos;
}

std::vector<UnitId> Segmenter::encode(std::string_view seq) const {
  const std::size_t n = seq.size();
  std::vector<UnitId> tok(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = char_ids_[static_cast<unsigned char>(seq[i])];
    if (!id) {
      throw LookupError("character '" + std::string(1, seq[i]) + "' at position " + std::to_string(i + 1) +
                        " is not in the vocabulary");
    }
    tok[i] = *id;
  }
  if (n < 2 || ranks_.empty()) return tok;

  // Tokens live in a doubly linked list indexed by their first residue.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> prev(n), next(n);
  std::vector<char> alive(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = i == 0 ? kNone : i - 1;
    next[i] = i + 1 == n ? kNone : i + 1;
  }

  // (rank, left position, left id, right id); min-heap. Equal ranks pop in
  // position order, which reproduces the left-to-right pass of one rule.
  struct Cand {
    std::uint32_t rank;
    std::size_t pos;
    UnitId left;
    UnitId right;
    bool operator>(const Cand& o) const { return rank != o.rank ? rank > o.rank : pos > o.pos; }
  };
  std::priority_queue<Cand, std::vector<Cand>, std::greater<>> heap;
  auto offer = [&](std::size_t left, std::int64_t cursor) {
    if (left == kNone || next[left] == kNone) return;
    const UnitPair p{tok[left], tok[next[left]]};
    if (auto r = next_rank(p, cursor)) heap.push({*r, left, p.left, p.right});
  };
  for (std::size_t i = 0; i + 1 < n; ++i) offer(i, -1);

  while (!heap.empty()) {
    const Cand c = heap.top();
    heap.pop();
    const std::size_t right = next[c.pos];
    if (!alive[c.pos] || right == kNone || tok[c.pos] != c.left || tok[right] != c.right) continue;
    const UnitId merged = vocab_.merges()[c.rank].result;
    tok[c.pos] = merged;
    alive[right] = 0;
    next[c.pos] = next[right];
    if (next[right] != kNone) prev[next[right]] = c.pos;
    const auto cursor = static_cast<std::int64_t>(c.rank);
    offer(prev[c.pos], cursor);
    offer(c.pos, cursor);
  }

  std::vector<UnitId> out;
  for (std::size_t i = 0; i != kNone; i = next[i]) out.push_back(tok[i]);
  return out;
}

std::string Segmenter::decode(std::span<const UnitId> ids) const {
  std::string out;
  for (UnitId id : ids) out += vocab_.str(id);
  return out;
}

UnitSpan Segmenter::unit_at(std::span<const UnitId> encoded, std::size_t pos) const {
  std::size_t begin = 1;
  for (UnitId id : encoded) {
    const std::size_t end = begin + vocab_.str(id).size();
    if (pos >= begin && pos < end) return {id, begin, end};
    begin = end;
  }
  throw LookupError("position " + std::to_string(pos) + " is outside a sequence of length " + std::to_string(begin - 1));
}

UnitSpan Segmenter::unit_at(std::string_view seq, std::size_t pos) const {
  if (pos < 1 || pos > seq.size()) {
    throw LookupError("position " + std::to_string(pos) + " is outside a sequence of length " + std::to_string(seq.size()));
  }
  const auto ids = encode(seq);
  return unit_at(std::span<const UnitId>(ids), pos);
}

std::vector<std::vector<UnitId>> Segmenter::encode_corpus(const Corpus& corpus, int threads) const {
  std::vector<std::vector<UnitId>> out(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = encode(corpus.records[i].seq);
  });
  return out;
}

}  // namespace puma
