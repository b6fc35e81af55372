#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace puma {

struct SequenceRecord {
  std::string id;
  std::string seq;
};

/// FASTA-derived protein sequences. Sequences are non-empty and uppercase.
struct Corpus {
  std::vector<SequenceRecord> records;

  /// Exact set of characters appearing in the records.
  std::set<char> alphabet() const;
  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::size_t residue_count() const;
};

/// One record per `>` header; the id is the header up to the first
/// whitespace. Sequence lines are concatenated, uppercased and stripped.
Corpus load_fasta(std::string_view text);
Corpus read_fasta(const std::filesystem::path& path);
void write_fasta(std::ostream& out, const Corpus& corpus);

struct Rejection {
  std::string id;
  std::string reason;
};

struct FilterResult {
  Corpus kept;
  std::vector<Rejection> rejected;
};

inline constexpr std::size_t kDefaultMaxLength = 3000;

/// Drops sequences longer than max_len and sequences carrying more than one
/// residue outside the 20 standard amino acids.
FilterResult filter_corpus(const Corpus& corpus, std::size_t max_len = kDefaultMaxLength);

/// TSV with columns id, reason.
void write_rejections(std::ostream& out, const std::vector<Rejection>& rejected);

/// 64-bit FNV-1a over the concatenated sequence bytes in record order.
std::uint64_t corpus_fingerprint(const Corpus& corpus);

}  // namespace puma
