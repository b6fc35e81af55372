#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

/// Labelled single-residue substitution; `pos` is 1-based.
struct VariantRecord {
  std::string seq_id;
  std::string sequence;
  std::size_t pos = 0;
  char ref = 0;
  char alt = 0;
  std::string label;

  /// sequence with alt at pos.
  std::string mutated() const;
};

struct VariantRejection {
  std::size_t line = 0;  // 1-based line of the TSV
  std::string seq_id;
  std::string reason;
};

struct VariantSet {
  std::vector<VariantRecord> records;
  std::vector<VariantRejection> rejected;
  std::size_t duplicates = 0;  // repeated (seq_id, pos, alt) rows dropped
};

/// TSV with a header naming at least seq_id, pos, ref, alt, label (any
/// order). Sequences come from `sequences` by id. Rows whose position or
/// reference residue does not match the sequence are rejected.
/// ParseError for a missing column; LookupError for an unknown seq_id.
VariantSet load_variants(std::string_view tsv, const Corpus& sequences);
VariantSet read_variants(const std::filesystem::path& tsv, const std::filesystem::path& fasta);
void write_variants(std::ostream& out, const std::vector<VariantRecord>& records);
void write_variant_rejections(std::ostream& out, const std::vector<VariantRejection>& rejected);

struct SiblingOutcome {
  std::string seq_id;
  std::size_t pos = 0;
  char ref = 0;
  char alt = 0;
  std::string label;
  UnitId original_unit = 0;
  UnitId mutated_unit = 0;
  bool event = false;
};

struct LabelRate {
  std::string label;
  std::size_t records = 0;
  std::size_t events = 0;
  double rate = 0;
};

struct SiblingReport {
  std::vector<LabelRate> by_label;       // sorted by label
  std::vector<SiblingOutcome> outcomes;  // sorted by seq_id, pos, alt
};

/// A record counts when the units covering `pos` before and after the
/// substitution share a family root whose family has at least two members.
SiblingReport same_sibling_rate(const Vocabulary& v, const std::vector<VariantRecord>& records, int threads = 1);
void write_rate_table_csv(std::ostream& out, const SiblingReport& report);
void write_outcomes_tsv(std::ostream& out, const Vocabulary& v, const SiblingReport& report);

/// n uniform (sequence, position) draws, each with a uniform alternative
/// among the standard residues other than the reference. Label "Random".
std::vector<VariantRecord> random_variants(const Corpus& corpus, std::size_t n, std::uint64_t seed);

struct MaskedQuery {
  std::string query_id;
  std::string seq_id;
  std::string sequence;
  std::size_t mask_pos = 0;  // 1-based
  char original_residue = 0;
  char sib_residue = 0;
  char alt_residue = 0;
  char random_residue = 0;  // uniform standard residue other than original and sibling
  std::string unit;
  std::string sibling_unit;
  std::string alt_unit;
};

struct SkippedOccurrence {
  std::string seq_id;
  std::size_t unit_begin = 0;  // 1-based
  std::string unit;
  std::string reason;  // no-single-substitution-sibling | no-qualifying-alternative
};

struct QueryOptions {
  /// Alternatives must be vocabulary units; otherwise any residue scoring at
  /// least as high as the sibling residue qualifies.
  bool vocab_constraint = true;
  /// Vocabulary alternatives must be inserted after the sibling.
  bool order_constraint = true;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct QuerySet {
  std::vector<MaskedQuery> queries;
  std::vector<SkippedOccurrence> skipped;
};

/// Masked-residue comparisons between single-substitution siblings and
/// non-sibling alternatives, for every unit occurrence in the corpus.
QuerySet gen_plm_queries(const Vocabulary& v, const Corpus& corpus, const QueryOptions& opts = {});

void write_queries(std::ostream& out, const std::vector<MaskedQuery>& queries);
std::vector<MaskedQuery> read_queries(std::string_view jsonl);
void write_skipped_tsv(std::ostream& out, const std::vector<SkippedOccurrence>& skipped);

/// query_id -> residue -> logit at the masked position.
using LogitTable = std::unordered_map<std::string, std::map<char, double>>;

LogitTable read_logits(std::string_view jsonl);
void write_logits(std::ostream& out, const std::vector<std::pair<std::string, std::map<char, double>>>& rows);

/// 1 if a > b, 0.5 if equal, 0 otherwise.
double win(double a, double b);

struct QueryWin {
  std::string query_id;
  double sib_logit = 0;
  double alt_logit = 0;
  double win = 0;
};

struct PairwiseRate {
  double rate = 0;
  std::uint64_t half_points = 0;  // sum of wins times two, exact
  std::size_t n = 0;
};

struct WinRateReport {
  PairwiseRate sibling_vs_alternative;
  std::optional<PairwiseRate> mutation_vs_original;  // sibling against original residue
  std::optional<PairwiseRate> mutation_vs_random;    // sibling against random residue
  std::vector<QueryWin> per_query;
};

/// LookupError when a query id or one of its residues is absent from the logits.
WinRateReport compute_win_rate(const std::vector<MaskedQuery>& queries, const LogitTable& logits);
void write_win_table_tsv(std::ostream& out, const WinRateReport& report);

}  // namespace puma
