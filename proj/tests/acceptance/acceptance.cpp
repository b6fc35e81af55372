// One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "puma/alignment.hpp"
#include "puma/segmenter.hpp"
#include "puma/topic_model.hpp"
#include "puma/trainer.hpp"
#include "puma/variant_eval.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (o.ok && limit_seconds > 0 && secs >= limit_seconds) {
    o.ok = false;
    o.detail = "over the time limit of " + std::to_string(limit_seconds) + " s";
  }
  if (!o.ok) ++failures;
  std::ostringstream line;
  line << (o.ok ? "PASS " : "FAIL ") << name << " [" << std::fixed;
  line.precision(2);
  line << secs << " s]";
  if (!o.detail.empty()) line << ": " << o.detail;
  std::cout << line.str() << std::endl;
}

std::vector<std::string> added_since(const puma::Vocabulary& v, std::size_t before) {
  std::vector<std::string> out;
  for (std::size_t i = before; i < v.size(); ++i) out.push_back(v.str(static_cast<puma::UnitId>(i)));
  return out;
}

Outcome mutation_example() {
  Outcome o;
  auto f = fixtures::expansion_example();
  const std::size_t before = f.vocab.size();
  puma::TrainerConfig cfg;
  cfg.vocab_size = before + 10;
  puma::Trainer t(std::move(f.vocab), std::move(f.rows), cfg);
  t.step();
  const auto added = added_since(t.vocab(), before);
  o.require(std::set<std::string>(added.begin(), added.end()) ==
                std::set<std::string>{"HTGEKPY", "HTGERPY", "HTGEKPF"} &&
                added.size() == 3,
            "unexpected units added");
  const auto& m = *cfg.matrix;
  o.require(!cfg.align_cutoff.admits(puma::positional_score(m, "HTGEKPY", "ZSGQKPY"), puma::self_score(m, "HTGEKPY")),
            "ZSGQKPY passes the similarity gate");
  bool zkpy = false;
  for (const auto& r : t.last_rejections()) {
    o.require(r.candidate_string != "ZSGQKPY", "ZSGQKPY reached the frequency gate");
    if (r.candidate_string == "HTGZKPY") {
      zkpy = r.reason == puma::RejectReason::BelowThreshold && r.pair_freq == 3;
    }
  }
  o.require(zkpy, "HTGZKPY not rejected below threshold with frequency 3");
  o.detail = o.ok ? "added HTGEKPY, HTGERPY, HTGEKPF" : o.detail;
  return o;
}

Outcome bpe_equivalence() {
  Outcome o;
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20 && o.ok; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const auto corpus = fixtures::random_corpus(rng, n, 1, 200, trial % 3 == 0 ? "ACDE" : "ACDEFGHIKLMNPQRSTVWY");
    puma::TrainerConfig cfg;
    cfg.mutations_enabled = false;
    cfg.vocab_size = corpus.alphabet().size() + 150;
    const auto v = puma::train(corpus, cfg);
    std::vector<std::string> seqs;
    for (const auto& r : corpus.records) seqs.push_back(r.seq);
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& s : v.merges()) got.emplace_back(v.str(s.pair.left), v.str(s.pair.right));
    o.require(got == oracle::naive_bpe(seqs, cfg.vocab_size), "merge sequence differs on corpus " + std::to_string(trial));
  }
  if (o.ok) o.detail = "20 corpora";
  return o;
}

Outcome enumeration() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::size_t variants = 0;
  for (int p = 0; p < 100 && o.ok; ++p) {
    const auto parent = fixtures::random_protein(rng, 1 + rng() % 6);
    for (const char* name : {"BLOSUM62", "PAM70"}) {
      const auto& m = puma::SubstitutionMatrix::bundled(name);
      for (const puma::Fraction a : {puma::Fraction{7, 10}, puma::Fraction{8, 10}, puma::Fraction{9, 10}}) {
        const auto got = puma::enumerate_variants(m, parent, a);
        std::set<std::string> s;
        for (const auto& g : got) s.insert(g.string);
        o.require(s.size() == got.size() && s == oracle::brute_force_variants(m, parent, a.num, a.den),
                  "mismatch for " + parent + " under " + name + " a=" + a.str());
        variants += got.size();
      }
    }
  }
  if (o.ok) o.detail = std::to_string(variants) + " variants over 600 cases";
  return o;
}

Outcome lossless(const puma::Vocabulary& v) {
  Outcome o;
  const puma::Segmenter seg(v);
  std::mt19937_64 rng(99);
  std::vector<std::string> seqs;
  for (int i = 0; i < 1000; ++i) seqs.push_back(fixtures::random_protein(rng, 1 + rng() % 400));
  const auto& real = fixtures::real_proteins();
  for (std::size_t i = 0; i < 1000; ++i) seqs.push_back(real.records[real.size() - 1 - i].seq);
  for (const auto& s : seqs) {
    const auto ids = seg.encode(s);
    o.require(seg.decode(ids) == s, "round trip failed");
    std::size_t pos = 1;
    for (auto id : ids) {
      const auto span = seg.unit_at(std::span<const puma::UnitId>(ids), pos);
      o.require(span.unit == id && span.begin == pos && span.end == pos + v.str(id).size(), "spans do not tile");
      pos = span.end;
    }
    o.require(pos == s.size() + 1, "spans do not cover the sequence");
    if (!o.ok) break;
  }
  if (o.ok) o.detail = "1000 random + 1000 real sequences";
  return o;
}

std::string serialize(const puma::Vocabulary& v) {
  std::ostringstream out;
  v.write(out);
  return out.str();
}

Outcome genealogy(const puma::Vocabulary& v, const puma::TrainerConfig& cfg) {
  Outcome o;
  const auto& m = *cfg.matrix;
  std::size_t children = 0;
  for (const auto& u : v.units()) {
    if (u.hier_parents) {
      o.require(v.str(u.hier_parents->left) + v.str(u.hier_parents->right) == u.string,
                "unit " + std::to_string(u.id) + " is not the concatenation of its parents");
    }
    if (u.mut_parent) {
      ++children;
      const auto& root = v.str(v.family_root(u.id));
      o.require(cfg.align_cutoff.admits(puma::positional_score(m, root, u.string), puma::self_score(m, root)),
                "unit " + std::to_string(u.id) + " is too far from its family root");
    }
  }
  // SAME-sibling as a relation: reflexive, symmetric, transitive
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<puma::UnitId> pick(0, static_cast<puma::UnitId>(v.size() - 1));
  std::vector<puma::UnitId> in_family;
  for (const auto& u : v.units()) {
    if (v.family_size(u.id) >= 2) in_family.push_back(u.id);
  }
  for (auto a : in_family) {
    o.require(v.same_family(a, a), "not reflexive");
    for (auto b : v.family_of(a)) {
      o.require(v.same_family(a, b) && v.same_family(b, a), "family members are not related");
      for (auto c : v.family_of(b)) o.require(v.same_family(a, c), "not transitive");
    }
  }
  for (int t = 0; t < 200000; ++t) {
    const auto a = pick(rng), b = pick(rng);
    o.require(v.same_family(a, b) == v.same_family(b, a), "not symmetric");
    o.require(v.same_family(a, b) == (v.family_root(a) == v.family_root(b)), "relation disagrees with family roots");
  }
  o.require(children > 0, "no mutational children to check");
  if (o.ok) o.detail = std::to_string(children) + " mutational children";
  return o;
}

puma::TermVectors restrict(const puma::TermVectors& tv, const std::set<std::string>& keep) {
  puma::TermVectors out;
  for (std::size_t i = 0; i < tv.terms.size(); ++i) {
    if (keep.count(tv.terms[i])) {
      out.terms.push_back(tv.terms[i]);
      out.vectors.push_back(tv.vectors[i]);
    }
  }
  return out;
}

Outcome topic_algebra() {
  Outcome o;
  // hand example: one class over four documents with counts t1:2, t2:2
  const puma::DocTermMatrix hand{{"d1", "d2", "d3", "d4"}, {"t1", "t2"}, {{{0, 1.0}}, {{0, 1.0}}, {{1, 1.0}}, {{1, 1.0}}}};
  const auto hm = puma::ctfidf(hand, puma::ClassSet{{"GO:1"}, {{0, 1, 2, 3}}});
  o.require(std::abs(hm.vectors.at(0).at(0).second - 0.5 * std::log(3.0)) < 1e-12, "hand value differs");

  const auto toy = fixtures::topic_toy(31, 500, 50);
  puma::TrainerConfig cfg;
  cfg.vocab_size = 600;
  const auto v = puma::train(toy.corpus, cfg);
  const auto enc = puma::unit_encoding(v, toy.corpus);
  puma::DocTermParams params;
  params.min_proteins = 5;
  const auto data = puma::build_doc_term(enc, toy.annotations, params);
  const auto graph = puma::build_adjacency(v);
  const auto plain = puma::ctfidf(data.dtm, data.classes);
  const auto lambda0 = puma::ctfidf(puma::smooth(data.dtm, graph, 0.0), data.classes);
  o.require(lambda0.vectors == plain.vectors, "lambda = 0 pipeline differs from plain c-TF-IDF");

  const auto go_true = puma::embed_go_vectors(toy.embeddings, data);
  const auto real = puma::similarity_correlation(puma::model_vectors(plain), go_true);
  double sum = 0, worst = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto shuffled = puma::shuffle_annotations(toy.annotations, seed);
    const auto sdata = puma::build_doc_term(enc, shuffled, params);
    auto model = puma::model_vectors(puma::ctfidf(sdata.dtm, sdata.classes));
    const std::set<std::string> shared(model.terms.begin(), model.terms.end());
    const auto rho = puma::similarity_correlation(model, restrict(go_true, shared)).rho;
    sum += rho;
    worst = std::max(worst, std::abs(rho));
  }
  const double mean = sum / 10;
  o.require(worst < 0.05, "a shuffled null gives |rho| " + std::to_string(worst));
  o.require(real.rho > 0.1, "toy carries no signal without shuffling, rho " + std::to_string(real.rho));
  if (o.ok) {
    std::ostringstream d;
    d << "0.5 ln 3 exact to 1e-12; lambda=0 identical; null mean rho " << mean << " (max |rho| " << worst
      << "), unshuffled rho " << real.rho;
    o.detail = d.str();
  }
  return o;
}

Outcome win_antisymmetry() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> logit(-3, 3);  // small range forces ties
  std::vector<puma::MaskedQuery> qs(1000), swapped;
  puma::LogitTable table;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto& q = qs[i];
    q.query_id = "q" + std::to_string(i + 1);
    q.original_residue = 'A';
    q.sib_residue = 'S';
    q.alt_residue = 'T';
    table[q.query_id] = {{'A', logit(rng)}, {'S', logit(rng)}, {'T', logit(rng)}};
  }
  swapped = qs;
  for (auto& q : swapped) std::swap(q.sib_residue, q.alt_residue);
  const auto a = puma::compute_win_rate(qs, table).sibling_vs_alternative;
  const auto b = puma::compute_win_rate(swapped, table).sibling_vs_alternative;
  o.require(a.half_points + b.half_points == 2 * qs.size(), "half points do not sum to the query count");
  // the rate is half_points / 2n, so complementary counters are the exact
  // form of r -> 1 - r; the doubles agree to rounding
  o.require(std::abs(b.rate - (1.0 - a.rate)) <= 1e-15, "rates are not complementary");
  if (o.ok) {
    o.detail = "half points " + std::to_string(a.half_points) + " + " + std::to_string(b.half_points) + " = 2 x " +
               std::to_string(qs.size());
  }
  return o;
}

Outcome planted() {
  Outcome o;
  const auto p = fixtures::planted_siblings(13, 500);
  const auto report = puma::same_sibling_rate(p.vocab, p.variants);
  for (const auto& r : report.by_label) {
    if (r.label == "within") o.require(r.rate == 1.0, "within-family rate " + std::to_string(r.rate));
    if (r.label == "across") o.require(r.rate == 0.0, "cross-family rate " + std::to_string(r.rate));
  }
  o.require(report.by_label.size() == 2, "expected two labels");
  if (o.ok) o.detail = "within 1.0, across 0.0";
  return o;
}

}  // namespace

int main() {
  criterion("mutation expansion worked example", 1.0, mutation_example);
  criterion("plain merging equals naive pair-merging oracle", 10.0, bpe_equivalence);
  criterion("pruned enumeration equals brute force", 30.0, enumeration);

  const auto& real = fixtures::real_proteins();
  puma::Corpus subsample;
  subsample.records.assign(real.records.begin(), real.records.begin() + 2000);
  puma::TrainerConfig cfg;
  cfg.vocab_size = 3200;
  puma::Vocabulary trained;
  criterion("deterministic training at 1 thread", 300.0, [&] {
    cfg.threads = 1;
    trained = puma::train(subsample, cfg);
    Outcome o;
    o.require(trained.size() == 3200, "vocabulary has " + std::to_string(trained.size()) + " units");
    o.require(serialize(trained) == serialize(puma::train(subsample, cfg)), "two runs differ");
    return o;
  });
  criterion("deterministic training at 8 threads matches 1 thread", 300.0, [&] {
    cfg.threads = 8;
    Outcome o;
    o.require(serialize(puma::train(subsample, cfg)) == serialize(trained), "vocabulary files differ");
    cfg.threads = 1;
    return o;
  });
  criterion("lossless segmentation and tiling spans", 0, [&] { return lossless(trained); });
  criterion("genealogy invariants", 0, [&] { return genealogy(trained, cfg); });
  criterion("topic model algebra and shuffled null", 0, topic_algebra);
  criterion("win rate antisymmetry", 0, win_antisymmetry);
  criterion("planted sibling micro-corpus", 0, planted);

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
