#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "puma/alignment.hpp"
#include "puma/error.hpp"
#include "puma/trainer.hpp"

using puma::Fraction;
using puma::Trainer;
using puma::TrainerConfig;

namespace {

const puma::SubstitutionMatrix& blosum62() { return puma::SubstitutionMatrix::bundled("BLOSUM62"); }

std::vector<std::string> strings_of(const std::vector<puma::ScoredVariant>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(v.string);
  return out;
}

std::vector<std::string> added_since(const puma::Vocabulary& v, std::size_t before) {
  std::vector<std::string> out;
  for (std::size_t i = before; i < v.size(); ++i) out.push_back(v.str(static_cast<puma::UnitId>(i)));
  return out;
}

}  // namespace

TEST_CASE("worked mutation example adds the two qualifying siblings") {
  auto f = fixtures::expansion_example();
  const std::size_t before = f.vocab.size();
  TrainerConfig cfg;
  cfg.vocab_size = before + 3;
  Trainer t(std::move(f.vocab), std::move(f.rows), cfg);
  REQUIRE(t.step());
  const auto& v = t.vocab();
  CHECK(added_since(v, before) == std::vector<std::string>{"HTGEKPY", "HTGEKPF", "HTGERPY"});
  const auto parent = *v.find("HTGEKPY");
  CHECK(v.unit(*v.find("HTGERPY")).mut_parent == parent);
  CHECK(v.unit(*v.find("HTGEKPF")).mut_parent == parent);
  CHECK(v.unit(*v.find("HTGERPY")).hier_parents == puma::UnitPair{*v.find("HTG"), *v.find("ERPY")});

  bool saw_zkpy = false;
  for (const auto& r : t.last_rejections()) {
    CHECK(r.candidate_string != "ZSGQKPY");
    if (r.candidate_string == "HTGZKPY") {
      saw_zkpy = true;
      CHECK(r.reason == puma::RejectReason::BelowThreshold);
      CHECK(r.pair_freq == 3);
    }
  }
  CHECK(saw_zkpy);
  CHECK(t.state().counts_consistent());
  CHECK_FALSE(t.step());  // full
}

TEST_CASE("worked example scores") {
  const auto& m = blosum62();
  CHECK(puma::self_score(m, "HTGEKPY") == 43);
  CHECK(puma::positional_score(m, "HTGEKPY", "HTGERPY") == 40);
  CHECK(puma::positional_score(m, "HTGEKPY", "ZSGQKPY") == 28);
  CHECK(puma::positional_score(m, "HTGEKPY", "HTGZKPY") == 42);
  const auto variants = strings_of(puma::enumerate_variants(m, "HTGEKPY", Fraction{7, 10}));
  CHECK(std::find(variants.begin(), variants.end(), "ZSGQKPY") == variants.end());
  CHECK(std::find(variants.begin(), variants.end(), "HTGZKPY") != variants.end());
}

TEST_CASE("a full vocabulary stops in the middle of a family") {
  auto f = fixtures::expansion_example();
  const std::size_t before = f.vocab.size();
  TrainerConfig cfg;
  cfg.vocab_size = before + 2;
  Trainer t(std::move(f.vocab), std::move(f.rows), cfg);
  REQUIRE(t.step());
  CHECK(added_since(t.vocab(), before) == std::vector<std::string>{"HTGEKPY", "HTGEKPF"});
  CHECK(t.vocab().size() == cfg.vocab_size);
}

TEST_CASE("AAA variants under BLOSUM62") {
  CHECK(strings_of(puma::enumerate_variants(blosum62(), "AAA", Fraction{7, 10})) ==
        std::vector<std::string>{"AAS", "ASA", "SAA"});
  CHECK(puma::enumerate_variants(blosum62(), "AAA", Fraction{9, 10}).empty());
  const auto v = puma::enumerate_variants(blosum62(), "AAA", Fraction{7, 10});
  CHECK(v.front().positional_score == 9);
}

TEST_CASE("pruned enumeration equals brute force") {
  std::mt19937_64 rng(17);
  for (const char* name : {"BLOSUM62", "PAM70"}) {
    const auto& m = puma::SubstitutionMatrix::bundled(name);
    for (const Fraction a : {Fraction{7, 10}, Fraction{8, 10}, Fraction{9, 10}}) {
      for (int t = 0; t < 15; ++t) {
        const auto parent = fixtures::random_protein(rng, 1 + rng() % 4);
        const auto got = puma::enumerate_variants(m, parent, a);
        std::set<std::string> got_set;
        for (const auto& v : got) {
          CHECK(v.positional_score == puma::positional_score(m, parent, v.string));
          got_set.insert(v.string);
        }
        CHECK(got_set.size() == got.size());
        CHECK(got_set == oracle::brute_force_variants(m, parent, a.num, a.den));
        CHECK(puma::enumerate_variants(m, parent, a, true).size() ==
              oracle::brute_force_variants(m, parent, a.num, a.den, true).size());
      }
    }
  }
}

TEST_CASE("enumeration order follows per-position preference") {
  const auto& m = blosum62();
  const std::string parent = "KWEA";
  const auto got = puma::enumerate_variants(m, parent, Fraction{7, 10});
  REQUIRE(got.size() > 2);
  auto rank_key = [&](const std::string& s) {
    std::vector<std::size_t> key;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto opts = m.allowed_substitutions(parent[i]);
      key.push_back(static_cast<std::size_t>(std::find(opts.begin(), opts.end(), s[i]) - opts.begin()));
    }
    return key;
  };
  for (std::size_t i = 1; i < got.size(); ++i) CHECK(rank_key(got[i - 1].string) < rank_key(got[i].string));
}

TEST_CASE("candidate validation reasons") {
  auto f = fixtures::expansion_example();
  TrainerConfig cfg;
  const auto& v = f.vocab;
  const auto state = puma::SegState::from_rows(f.rows, v);
  auto reason = [&](const std::string& s, std::int64_t parent_freq) {
    return std::visit(
        [](const auto& r) -> std::string {
          if constexpr (std::is_same_v<std::decay_t<decltype(r)>, puma::MutantCandidate>) {
            return "accepted:" + std::to_string(r.pair_freq);
          } else {
            return std::string(puma::to_string(r.reason)) + ":" + std::to_string(r.pair_freq);
          }
        },
        puma::validate_candidate({s, 0}, "HTGEKPY", parent_freq, state, v, cfg));
  };
  CHECK(reason("HTGERPY", 1931) == "accepted:100");
  CHECK(reason("HTGZKPY", 1931) == "below-threshold:3");
  CHECK(reason("HTGZKPY", 60) == "accepted:3");
  CHECK(reason("HSGEKPY", 1931) == "no-valid-split:0");
  CHECK(reason("EKPY", 1931) == "already-present:0");
  // a split of two units that never occur together has frequency zero
  cfg.freq_cutoff = Fraction{0, 1};
  CHECK(reason("HTGQKPY", 1931) == "below-threshold:0");
}

TEST_CASE("plain pair merging equals the naive oracle") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const auto corpus = fixtures::random_corpus(rng, 1 + rng() % 30, 1, 80, trial % 2 ? "ACDE" : "ACDEFGHIKLMNPQRSTVWY");
    TrainerConfig cfg;
    cfg.mutations_enabled = false;
    cfg.vocab_size = corpus.alphabet().size() + 60;
    const auto v = puma::train(corpus, cfg);
    std::vector<std::string> seqs;
    for (const auto& r : corpus.records) seqs.push_back(r.seq);
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& step : v.merges()) got.emplace_back(v.str(step.pair.left), v.str(step.pair.right));
    CHECK(got == oracle::naive_bpe(seqs, cfg.vocab_size));
    CHECK(v.meta().label() == "BPE");
  }
}

TEST_CASE("trained genealogy invariants") {
  puma::Corpus corpus;
  const auto& real = fixtures::real_proteins();
  corpus.records.assign(real.records.begin(), real.records.begin() + 200);
  TrainerConfig cfg;
  cfg.vocab_size = 800;
  const auto v = puma::train(corpus, cfg);
  CHECK(v.size() == 800);
  CHECK_NOTHROW(v.validate());
  CHECK(v.meta().label() == "PUMA(BLOSUM62, 0.7, 0.05)");
  std::size_t children = 0;
  for (const auto& u : v.units()) {
    if (u.hier_parents) CHECK(v.str(u.hier_parents->left) + v.str(u.hier_parents->right) == u.string);
    if (!u.mut_parent) continue;
    ++children;
    const auto& p = v.unit(*u.mut_parent);
    CHECK(p.id < u.id);
    CHECK_FALSE(p.mut_parent.has_value());
    CHECK(p.string.size() == u.string.size());
    CHECK(cfg.align_cutoff.admits(puma::positional_score(*cfg.matrix, p.string, u.string),
                                  puma::self_score(*cfg.matrix, p.string)));
  }
  CHECK(children > 0);
}

TEST_CASE("training is independent of the worker count") {
  puma::Corpus corpus;
  const auto& real = fixtures::real_proteins();
  corpus.records.assign(real.records.begin(), real.records.begin() + 100);
  TrainerConfig cfg;
  cfg.vocab_size = 400;
  const auto one = puma::train(corpus, cfg);
  cfg.threads = 4;
  CHECK(puma::train(corpus, cfg) == one);
}

TEST_CASE("configuration checks") {
  TrainerConfig cfg;
  cfg.align_cutoff = Fraction{0, 1};
  CHECK_THROWS_AS(cfg.validate(), puma::ValidationError);
  cfg = {};
  cfg.freq_cutoff = Fraction{3, 2};
  CHECK_THROWS_AS(cfg.validate(), puma::ValidationError);
  cfg = {};
  cfg.min_mut_len = 5;
  cfg.max_mut_len = 4;
  CHECK_THROWS_AS(cfg.validate(), puma::ValidationError);
  cfg = {};
  cfg.vocab_size = 2;
  puma::Corpus c;
  c.records.push_back({"a", "ACD"});
  CHECK_THROWS_AS(Trainer(c, cfg), puma::ValidationError);
  CHECK_THROWS_AS(Trainer(puma::Corpus{}, TrainerConfig{}), puma::ValidationError);
}

TEST_CASE("progress callback sees growing sizes") {
  std::mt19937_64 rng(4);
  const auto corpus = fixtures::random_corpus(rng, 20, 10, 40);
  TrainerConfig cfg;
  cfg.vocab_size = 60;
  std::vector<std::size_t> seen;
  puma::train(corpus, cfg, [&](std::size_t n) { seen.push_back(n); });
  REQUIRE_FALSE(seen.empty());
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  CHECK(seen.back() <= 60);
}
