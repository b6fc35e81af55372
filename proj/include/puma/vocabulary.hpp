#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "puma/fraction.hpp"
#include "puma/types.hpp"

namespace puma {

/// One vocabulary entry with its genealogy links.
struct UnitRecord {
  UnitId id = 0;
  std::string string;
  std::uint32_t insertion_index = 0;
  std::optional<UnitPair> hier_parents;  // none for initial characters
  std::optional<UnitId> mut_parent;      // set for mutational children
  std::optional<UnitPair> merge_rule;    // pair whose merge first produced the unit

  friend bool operator==(const UnitRecord&, const UnitRecord&) = default;
};

/// A merge applied during training, in application order. Most steps create
/// a unit; a step whose result already existed (a "remerge") only rewrites
/// the segmentation and is kept so that encoding replays training exactly.
struct MergeStep {
  UnitPair pair;
  UnitId result = 0;
  bool creates_unit = true;

  friend bool operator==(const MergeStep&, const MergeStep&) = default;
};

struct VocabMeta {
  std::string matrix = "BLOSUM62";
  Fraction align_cutoff{7, 10};
  Fraction freq_cutoff{1, 20};
  std::size_t vocab_size = 0;
  std::uint64_t corpus_fingerprint = 0;
  bool mutations_enabled = true;
  int min_mut_len = 3;
  int max_mut_len = 12;

  /// "PUMA(BLOSUM62, 0.7, 0.05)" or "BPE" when mutations are off.
  std::string label() const;

  friend bool operator==(const VocabMeta&, const VocabMeta&) = default;
};

class Vocabulary {
 public:
  Vocabulary() = default;

  /// Vocabulary of the given single characters, in ascending order.
  static Vocabulary from_characters(std::string_view chars);

  UnitId add_character(char c);
  /// Appends a unit produced by merging `pair`; its hierarchical parents and
  /// merge rule are both `pair`.
  UnitId add_merged(UnitPair pair, std::optional<UnitId> mut_parent = std::nullopt);
  /// Records a merge whose result already exists.
  void add_remerge(UnitPair pair, UnitId existing);

  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }
  const UnitRecord& unit(UnitId id) const;
  const std::vector<UnitRecord>& units() const { return units_; }
  const std::string& str(UnitId id) const { return unit(id).string; }
  std::optional<UnitId> find(std::string_view s) const;
  bool contains(std::string_view s) const { return find(s).has_value(); }
  const std::vector<MergeStep>& merges() const { return merges_; }

  /// mut_parent(u) if present, else u.
  UnitId family_root(UnitId u) const;
  /// {root} plus every unit whose mut_parent is the root, ascending ids.
  std::vector<UnitId> family_of(UnitId u) const;
  std::size_t family_size(UnitId u) const;
  /// SAME-sibling predicate: both units share a family root.
  bool same_family(UnitId a, UnitId b) const { return family_root(a) == family_root(b); }
  /// Direct mutational children of u.
  const std::vector<UnitId>& children(UnitId u) const;

  VocabMeta& meta() { return meta_; }
  const VocabMeta& meta() const { return meta_; }

  /// Re-checks every structural invariant; throws ValidationError naming the
  /// unit id and violated rule.
  void validate() const;

  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.units_ == b.units_ && a.merges_ == b.merges_ && a.meta_ == b.meta_;
  }

 private:
  UnitId push(UnitRecord rec);

  std::vector<UnitRecord> units_;
  std::vector<MergeStep> merges_;
  std::unordered_map<std::string, UnitId> by_string_;
  std::vector<std::vector<UnitId>> children_;
  VocabMeta meta_;
};

}  // namespace puma
