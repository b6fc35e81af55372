#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/fraction.hpp"
#include "puma/matrix.hpp"
#include "puma/seg_state.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

struct TrainerConfig {
  std::size_t vocab_size = 3200;
  const SubstitutionMatrix* matrix = &SubstitutionMatrix::bundled("BLOSUM62");
  Fraction align_cutoff{7, 10};  // a, in (0, 1]
  Fraction freq_cutoff{1, 20};   // f, in [0, 1]
  int min_mut_len = 3;
  int max_mut_len = 12;
  bool mutations_enabled = true;
  bool standard_targets_only = false;  // exclude B/Z/X as substitution targets
  int threads = 1;

  /// Throws ValidationError when a parameter is out of range.
  void validate() const;
};

/// A substitution-only variant of a parent that passed the similarity gate.
struct ScoredVariant {
  std::string string;
  int positional_score = 0;

  friend bool operator==(const ScoredVariant&, const ScoredVariant&) = default;
};

struct MutantCandidate {
  std::string parent_string;
  std::string candidate_string;
  int positional_score = 0;
  std::optional<UnitPair> chosen_split;
  std::int64_t pair_freq = 0;
};

enum class RejectReason { NoValidSplit, BelowThreshold, AlreadyPresent };

const char* to_string(RejectReason r);

struct CandidateRejection {
  std::string candidate_string;
  RejectReason reason;
  std::int64_t pair_freq = 0;
};

/// Depth-first enumeration of the product of allowed substitutions per
/// position, pruning every prefix that can no longer reach
/// a * self_score(parent). The identity string is excluded. Output order:
/// positions left to right, substitutions by descending score then letter.
std::vector<ScoredVariant> enumerate_variants(const SubstitutionMatrix& m, std::string_view parent, Fraction align_cutoff,
                                              bool standard_targets_only = false);

/// Frequency gate. The candidate's frequency is the largest live pair count
/// over split points whose halves are both vocabulary units (ties: smallest
/// split point). Accepted iff that frequency is >= f * parent_pair_freq, is
/// at least 1, and the candidate is not already a unit.
std::variant<MutantCandidate, CandidateRejection> validate_candidate(const ScoredVariant& candidate,
                                                                     std::string_view parent,
                                                                     std::int64_t parent_pair_freq,
                                                                     const SegState& state, const Vocabulary& vocab,
                                                                     const TrainerConfig& cfg);

/// Iterative most-frequent-pair merging with mutation-aware family
/// expansion. Owns the vocabulary and the segmentation state.
class Trainer {
 public:
  /// Starts from the character vocabulary of `corpus`.
  Trainer(const Corpus& corpus, TrainerConfig cfg);
  /// Starts from an existing vocabulary and segmentation (used to replay a
  /// specific training state).
  Trainer(Vocabulary vocab, std::vector<std::vector<UnitId>> rows, TrainerConfig cfg);

  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  /// One iteration: pop the most frequent live pair, merge it, expand its
  /// mutations. Returns false once the vocabulary is full or no pair is left.
  bool step();
  /// Steps until done; returns the vocabulary.
  const Vocabulary& run();

  /// Similarity and frequency gates for a freshly merged parent unit; every
  /// accepted candidate is added and merged, in enumeration order, until the
  /// vocabulary is full.
  std::vector<MutantCandidate> expand_mutations(UnitId parent, std::int64_t parent_pair_freq);

  const Vocabulary& vocab() const { return *vocab_; }
  Vocabulary release() { return std::move(*vocab_); }
  const SegState& state() const { return state_; }
  const TrainerConfig& config() const { return cfg_; }

  /// Candidates rejected during the most recent expand_mutations call.
  const std::vector<CandidateRejection>& last_rejections() const { return last_rejections_; }

  /// Called after each step with the current vocabulary size.
  std::function<void(std::size_t)> on_progress;

 private:
  bool full() const { return vocab_->size() >= cfg_.vocab_size; }

  TrainerConfig cfg_;
  std::unique_ptr<Vocabulary> vocab_;
  SegState state_;
  std::vector<CandidateRejection> last_rejections_;
};

/// Trains on a corpus and fills in the vocabulary metadata.
Vocabulary train(const Corpus& corpus, const TrainerConfig& cfg,
                 std::function<void(std::size_t)> on_progress = {});

}  // namespace puma
