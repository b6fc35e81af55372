#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/topic_model.hpp"
#include "puma/variant_eval.hpp"
#include "puma/vocabulary.hpp"

namespace fixtures {

std::filesystem::path dir();

/// Real protein sequences shipped with the tests.
const puma::Corpus& real_proteins();

std::string random_protein(std::mt19937_64& rng, std::size_t len,
                           std::string_view alphabet = "ACDEFGHIKLMNPQRSTVWY");
puma::Corpus random_corpus(std::mt19937_64& rng, std::size_t n, std::size_t min_len, std::size_t max_len,
                           std::string_view alphabet = "ACDEFGHIKLMNPQRSTVWY");

/// (left, right, mutational parent or "") merge list applied after the
/// sorted single characters of `chars`.
using MergeSpec = std::tuple<std::string, std::string, std::string>;
puma::Vocabulary make_vocab(std::string_view chars, const std::vector<MergeSpec>& merges);

/// Training state just before the merge of (HTG, EKPY) in the worked
/// mutation example: the pair occurs 1931 times, (HTG, ZKPY) 3 times,
/// (HTG, ERPY) and (HTG, EKPF) 100 times each and (ZSG, QKPY) 200 times.
struct ExpansionExample {
  puma::Vocabulary vocab;
  std::vector<std::vector<puma::UnitId>> rows;
};
ExpansionExample expansion_example();

/// Families planted in a hand-built vocabulary with variants labelled
/// "within" (root turned into its child) and "across" (no shared family).
struct PlantedSiblings {
  puma::Vocabulary vocab;
  puma::Corpus sequences;
  std::vector<puma::VariantRecord> variants;
};
PlantedSiblings planted_siblings(std::uint64_t seed, std::size_t n_sequences);

/// Proteins carrying motifs of their GO class, one class each, with
/// embeddings near a per-class centroid. Classes come in groups of about
/// five that share motifs and have nearby centroids.
struct TopicToy {
  puma::Corpus corpus;
  std::vector<puma::GoAnnotation> annotations;
  puma::Embeddings embeddings;
};
TopicToy topic_toy(std::uint64_t seed, std::size_t n_proteins, std::size_t n_classes);

}  // namespace fixtures
