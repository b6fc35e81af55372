#include "puma/trainer.hpp"

#include <algorithm>
#include <memory>

#include "puma/alignment.hpp"
#include "puma/error.hpp"

namespace puma {

void TrainerConfig::validate() const {
  if (matrix == nullptr) throw ValidationError("no substitution matrix configured");
  if (align_cutoff.num <= 0 || align_cutoff.num > align_cutoff.den) {
    throw ValidationError("alignment cut-off a must lie in (0, 1], got " + align_cutoff.str());
  }
  if (freq_cutoff.num < 0 || freq_cutoff.num > freq_cutoff.den) {
    throw ValidationError("frequency cut-off f must lie in [0, 1], got " + freq_cutoff.str());
  }
  if (min_mut_len < 1 || min_mut_len > max_mut_len) {
    throw ValidationError("mutation length bounds must satisfy 1 <= min <= max");
  }
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::NoValidSplit:
      return "no-valid-split";
    case RejectReason::BelowThreshold:
      return "below-threshold";
    case RejectReason::AlreadyPresent:
      return "already-present";
  }
  return "unknown";
}

namespace {

struct VariantSearch {
  std::string_view parent;
  Fraction cutoff;
  int self = 0;
  std::vector<std::vector<std::pair<char, int>>> options;  // per position, best first
  std::vector<int> best_suffix;                             // max reachable score from position i on
  std::string buf;
  std::vector<ScoredVariant> out;

  void dfs(std::size_t pos, int prefix, std::size_t substitutions) {
    if (pos == buf.size()) {
      if (substitutions > 0) out.push_back({buf, prefix});
      return;
    }
    for (const auto& [residue, score] : options[pos]) {
      // options are sorted by score, so once one cannot reach the cut-off
      // none of the rest can
      if (!cutoff.admits(prefix + score + best_suffix[pos + 1], self)) break;
      buf[pos] = residue;
      dfs(pos + 1, prefix + score, substitutions + (residue != parent[pos] ? 1 : 0));
    }
    buf[pos] = parent[pos];
  }
};

}  // namespace

std::vector<ScoredVariant> enumerate_variants(const SubstitutionMatrix& m, std::string_view parent, Fraction align_cutoff,
                                              bool standard_targets_only) {
  VariantSearch search{parent, align_cutoff, self_score(m, parent), {}, {}, std::string(parent), {}};
  const std::size_t n = parent.size();
  search.options.resize(n);
  search.best_suffix.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (char b : m.allowed_substitutions(parent[i], standard_targets_only)) {
      search.options[i].emplace_back(b, m.score_unchecked(parent[i], b));
    }
  }
  for (std::size_t i = n; i-- > 0;) search.best_suffix[i] = search.best_suffix[i + 1] + search.options[i].front().second;
  if (n > 0) search.dfs(0, 0, 0);
  return std::move(search.out);
}

std::variant<MutantCandidate, CandidateRejection> validate_candidate(const ScoredVariant& candidate,
                                                                     std::string_view parent,
                                                                     std::int64_t parent_pair_freq,
                                                                     const SegState& state, const Vocabulary& vocab,
                                                                     const TrainerConfig& cfg) {
  const std::string& s = candidate.string;
  if (vocab.contains(s)) return CandidateRejection{s, RejectReason::AlreadyPresent, 0};
  std::optional<UnitPair> best;
  std::int64_t best_freq = -1;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const auto left = vocab.find(std::string_view(s).substr(0, k));
    if (!left) continue;
    const auto right = vocab.find(std::string_view(s).substr(k));
    if (!right) continue;
    const UnitPair split{*left, *right};
    const std::int64_t freq = state.count(split);
    if (freq > best_freq) {
      best_freq = freq;
      best = split;
    }
  }
  if (!best) return CandidateRejection{s, RejectReason::NoValidSplit, 0};
  if (best_freq < 1 || !cfg.freq_cutoff.admits(best_freq, parent_pair_freq)) {
    return CandidateRejection{s, RejectReason::BelowThreshold, best_freq};
  }
  return MutantCandidate{std::string(parent), s, candidate.positional_score, best, best_freq};
}

Trainer::Trainer(const Corpus& corpus, TrainerConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  if (corpus.empty()) throw ValidationError("cannot train on an empty corpus");
  const auto alphabet = corpus.alphabet();
  if (cfg_.vocab_size < alphabet.size()) {
    throw ValidationError("vocabulary size " + std::to_string(cfg_.vocab_size) + " is smaller than the " +
                          std::to_string(alphabet.size()) + " distinct characters of the corpus");
  }
  vocab_ = std::make_unique<Vocabulary>(Vocabulary::from_characters(std::string(alphabet.begin(), alphabet.end())));
  state_ = SegState::build(corpus, *vocab_, cfg_.threads);
}

Trainer::Trainer(Vocabulary vocab, std::vector<std::vector<UnitId>> rows, TrainerConfig cfg)
    : cfg_(std::move(cfg)), vocab_(std::make_unique<Vocabulary>(std::move(vocab))) {
  cfg_.validate();
  state_ = SegState::from_rows(std::move(rows), *vocab_, cfg_.threads);
}

bool Trainer::step() {
  if (full()) return false;
  const auto top = state_.pop_max();
  if (!top) return false;
  const UnitPair pair = top->pair;
  const std::string merged = vocab_->str(pair.left) + vocab_->str(pair.right);
  if (const auto existing = vocab_->find(merged)) {
    // already added as a mutational child: rewrite the segmentation only
    vocab_->add_remerge(pair, *existing);
    state_.apply_merge(pair, *existing, cfg_.threads);
    return true;
  }
  const UnitId id = vocab_->add_merged(pair);
  state_.apply_merge(pair, id, cfg_.threads);
  const auto len = static_cast<int>(merged.size());
  if (cfg_.mutations_enabled && len >= cfg_.min_mut_len && len <= cfg_.max_mut_len) {
    expand_mutations(id, top->count);
  }
  if (on_progress) on_progress(vocab_->size());
  return true;
}

const Vocabulary& Trainer::run() {
  while (step()) {
  }
  return *vocab_;
}

std::vector<MutantCandidate> Trainer::expand_mutations(UnitId parent, std::int64_t parent_pair_freq) {
  last_rejections_.clear();
  std::vector<MutantCandidate> accepted;
  if (full()) return accepted;
  const std::string parent_str = vocab_->str(parent);
  const auto& m = *cfg_.matrix;
  for (char c : parent_str) {
    if (!m.has(c)) return accepted;  // residues outside the matrix have no substitutions
  }
  if (self_score(m, parent_str) <= 0) return accepted;

  const auto variants = enumerate_variants(m, parent_str, cfg_.align_cutoff, cfg_.standard_targets_only);
  // Every candidate is judged against the state right after the parent merge.
  for (const auto& v : variants) {
    auto verdict = validate_candidate(v, parent_str, parent_pair_freq, state_, *vocab_, cfg_);
    if (auto* ok = std::get_if<MutantCandidate>(&verdict)) {
      accepted.push_back(std::move(*ok));
    } else {
      last_rejections_.push_back(std::get<CandidateRejection>(verdict));
    }
  }
  std::size_t applied = 0;
  for (; applied < accepted.size() && !full(); ++applied) {
    const auto& cand = accepted[applied];
    const UnitId child = vocab_->add_merged(*cand.chosen_split, parent);
    state_.apply_merge(*cand.chosen_split, child, cfg_.threads);
  }
  accepted.resize(applied);
  return accepted;
}

Vocabulary train(const Corpus& corpus, const TrainerConfig& cfg, std::function<void(std::size_t)> on_progress) {
  Trainer trainer(corpus, cfg);
  trainer.on_progress = std::move(on_progress);
  trainer.run();
  Vocabulary v = trainer.release();
  auto& meta = v.meta();
  meta.matrix = cfg.matrix->name();
  meta.align_cutoff = cfg.align_cutoff;
  meta.freq_cutoff = cfg.freq_cutoff;
  meta.vocab_size = cfg.vocab_size;
  meta.corpus_fingerprint = corpus_fingerprint(corpus);
  meta.mutations_enabled = cfg.mutations_enabled;
  meta.min_mut_len = cfg.min_mut_len;
  meta.max_mut_len = cfg.max_mut_len;
  return v;
}

}  // namespace puma
