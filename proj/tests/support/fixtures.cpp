#include "fixtures.hpp"

#include <algorithm>

#include "puma/error.hpp"

namespace fixtures {

using puma::UnitId;
using puma::UnitPair;
using puma::Vocabulary;

std::filesystem::path dir() { return PUMA_FIXTURE_DIR; }

const puma::Corpus& real_proteins() {
  static const puma::Corpus c = puma::read_fasta(dir() / "real_proteins.fasta");
  return c;
}

std::string random_protein(std::mt19937_64& rng, std::size_t len, std::string_view alphabet) {
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::string s(len, 'A');
  for (char& c : s) c = alphabet[pick(rng)];
  return s;
}

puma::Corpus random_corpus(std::mt19937_64& rng, std::size_t n, std::size_t min_len, std::size_t max_len,
                           std::string_view alphabet) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  puma::Corpus c;
  for (std::size_t i = 0; i < n; ++i) c.records.push_back({"r" + std::to_string(i), random_protein(rng, len(rng), alphabet)});
  return c;
}

Vocabulary make_vocab(std::string_view chars, const std::vector<MergeSpec>& merges) {
  std::string sorted(chars);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Vocabulary v = Vocabulary::from_characters(sorted);
  for (const auto& [l, r, parent] : merges) {
    const auto li = v.find(l), ri = v.find(r);
    if (!li || !ri) throw puma::LookupError("fixture merge uses unknown unit " + l + "|" + r);
    std::optional<UnitId> mp;
    if (!parent.empty()) mp = v.find(parent);
    v.add_merged(UnitPair{*li, *ri}, mp);
  }
  return v;
}

ExpansionExample expansion_example() {
  ExpansionExample f;
  f.vocab = make_vocab("EFGHKPQRSTYZ", {
                                           {"H", "T", ""},    {"HT", "G", ""},   {"E", "K", ""},   {"EK", "P", ""},
                                           {"EKP", "Y", ""},  {"Z", "K", ""},    {"ZK", "P", ""},  {"ZKP", "Y", ""},
                                           {"E", "R", ""},    {"ER", "P", ""},   {"ERP", "Y", ""}, {"EKP", "F", ""},
                                           {"Z", "S", ""},    {"ZS", "G", ""},   {"Q", "K", ""},   {"QK", "P", ""},
                                           {"QKP", "Y", ""},
                                       });
  auto id = [&](const char* s) { return *f.vocab.find(s); };
  auto add = [&](const char* a, const char* b, int n) {
    for (int i = 0; i < n; ++i) f.rows.push_back({id(a), id(b)});
  };
  add("HTG", "EKPY", 1931);
  add("HTG", "ZKPY", 3);
  add("HTG", "ERPY", 100);
  add("HTG", "EKPF", 100);
  add("ZSG", "QKPY", 200);
  return f;
}

PlantedSiblings planted_siblings(std::uint64_t seed, std::size_t n_sequences) {
  PlantedSiblings p;
  // three families: root of length 3 plus a child that ends in A
  p.vocab = make_vocab("ACDEFGHIKLMNPQRSTVWY", {
                                                  {"C", "S", ""},
                                                  {"CS", "K", ""},
                                                  {"CS", "A", "CSK"},
                                                  {"H", "T", ""},
                                                  {"HT", "G", ""},
                                                  {"HT", "A", "HTG"},
                                                  {"M", "W", ""},
                                                  {"MW", "P", ""},
                                                  {"MW", "A", "MWP"},
                                              });
  const std::vector<std::string> roots{"CSK", "HTG", "MWP"};
  const std::string spacers = "DEFILVY";  // residues no merge touches
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_root(0, roots.size() - 1), pick_sp(0, spacers.size() - 1);
  std::uniform_int_distribution<int> n_roots(1, 4);
  for (std::size_t i = 0; i < n_sequences; ++i) {
    std::string seq(1, spacers[pick_sp(rng)]);
    std::vector<std::size_t> root_starts;
    const int k = n_roots(rng);
    for (int r = 0; r < k; ++r) {
      root_starts.push_back(seq.size() + 1);
      seq += roots[pick_root(rng)];
      seq += spacers[pick_sp(rng)];
    }
    const std::string id = "p" + std::to_string(i);
    p.sequences.records.push_back({id, seq});
    for (std::size_t start : root_starts) {
      const std::size_t last = start + 2;
      p.variants.push_back({id, seq, last, seq[last - 1], 'A', "within"});
      // middle residue to a spacer breaks the root apart
      const std::size_t mid = start + 1;
      p.variants.push_back({id, seq, mid, seq[mid - 1], 'D', "across"});
    }
    // a spacer changed into another spacer stays outside every family
    const char sp = seq[0];
    p.variants.push_back({id, seq, 1, sp, sp == 'E' ? 'F' : 'E', "across"});
  }
  return p;
}

TopicToy topic_toy(std::uint64_t seed, std::size_t n_proteins, std::size_t n_classes) {
  TopicToy t;
  std::mt19937_64 rng(seed);
  const std::size_t dim = 16;
  const std::size_t n_groups = std::max<std::size_t>(1, n_classes / 5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_vec = [&] {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    return v;
  };
  // classes of one group share motifs and a nearby centroid, so sequence
  // composition and embeddings carry the same similarity structure
  std::vector<std::vector<std::string>> group_motifs(n_groups);
  std::vector<std::vector<double>> group_centroid(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    for (int m = 0; m < 3; ++m) group_motifs[g].push_back(random_protein(rng, 5));
    group_centroid[g] = random_vec();
  }
  std::vector<std::vector<std::string>> motifs(n_classes);
  std::vector<std::vector<double>> centroid(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::size_t g = c % n_groups;
    motifs[c] = group_motifs[g];
    for (int m = 0; m < 2; ++m) motifs[c].push_back(random_protein(rng, 5));
    centroid[c] = random_vec();
    for (std::size_t d = 0; d < dim; ++d) centroid[c][d] = group_centroid[g][d] + 0.5 * centroid[c][d];
  }
  std::uniform_int_distribution<std::size_t> motif_pick(0, 4);
  std::uniform_int_distribution<std::size_t> bg_len(3, 12);
  for (std::size_t i = 0; i < n_proteins; ++i) {
    const std::size_t c = i % n_classes;
    std::string seq;
    for (int k = 0; k < 12; ++k) {
      seq += random_protein(rng, bg_len(rng));
      seq += motifs[c][motif_pick(rng)];
    }
    const std::string id = "toy" + std::to_string(i);
    t.corpus.records.push_back({id, seq});
    char go[32];
    std::snprintf(go, sizeof go, "GO:%07zu", c + 1);
    t.annotations.push_back({id, go, puma::GoAspect::MF});
    std::vector<double> e(dim);
    for (std::size_t d = 0; d < dim; ++d) e[d] = centroid[c][d] + 0.3 * gauss(rng);
    t.embeddings.emplace(id, std::move(e));
  }
  return t;
}

}  // namespace fixtures
