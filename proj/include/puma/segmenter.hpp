#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

/// Unit covering a residue; `begin`/`end` are 1-based, half-open.
struct UnitSpan {
  UnitId unit = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Encodes sequences by replaying the vocabulary's merge log in training
/// order, each step rewriting all of its pair's occurrences left to right.
/// Holds a reference to the vocabulary, which must outlive it.
class Segmenter {
 public:
  explicit Segmenter(const Vocabulary& vocab);

  const Vocabulary& vocab() const { return vocab_; }

  /// Throws LookupError naming the character and 1-based position for
  /// characters that are not vocabulary units.
  std::vector<UnitId> encode(std::string_view seq) const;
  std::string decode(std::span<const UnitId> ids) const;

  /// Unit of encode(seq) whose span contains the 1-based `pos`.
  UnitSpan unit_at(std::string_view seq, std::size_t pos) const;
  /// Same lookup on an existing encoding of a sequence.
  UnitSpan unit_at(std::span<const UnitId> encoded, std::size_t pos) const;

  /// Encodes every record; the result is independent of `threads`.
  std::vector<std::vector<UnitId>> encode_corpus(const Corpus& corpus, int threads = 1) const;

 private:
  /// Smallest merge rank of `pair` strictly greater than `after`.
  std::optional<std::uint32_t> next_rank(UnitPair pair, std::int64_t after) const;

  const Vocabulary& vocab_;
  std::array<std::optional<UnitId>, 256> char_ids_{};
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> ranks_;  // pair key -> ascending ranks
};

}  // namespace puma
