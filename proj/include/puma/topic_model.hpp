#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

enum class GoAspect { MF, BP, CC };

GoAspect parse_aspect(std::string_view s);
const char* to_string(GoAspect a);

struct GoAnnotation {
  std::string protein_id;
  std::string go_id;
  GoAspect aspect = GoAspect::MF;
};

/// TSV with header protein_id, go_id, aspect; duplicate rows are dropped.
std::vector<GoAnnotation> load_go_annotations(std::string_view tsv);
std::vector<GoAnnotation> read_go_annotations(const std::filesystem::path& path);

/// Null control: within each aspect the protein column is permuted across
/// annotation rows, keeping every term's row count. Duplicates are dropped.
std::vector<GoAnnotation> shuffle_annotations(const std::vector<GoAnnotation>& annotations, std::uint64_t seed);

/// Sparse row: (term index, value) sorted by term index, no explicit zeros.
using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

struct DocTermMatrix {
  std::vector<std::string> docs;
  std::vector<std::string> terms;
  std::vector<SparseRow> rows;  // one per doc

  std::size_t n_docs() const { return docs.size(); }
  std::size_t n_terms() const { return terms.size(); }
  double at(std::size_t doc, std::uint32_t term) const;

  friend bool operator==(const DocTermMatrix&, const DocTermMatrix&) = default;
};

/// Documents tokenised into term indices, in corpus order.
struct TermEncoding {
  std::vector<std::string> doc_ids;
  std::vector<std::string> terms;
  std::vector<std::vector<std::uint32_t>> docs;
};

TermEncoding unit_encoding(const Vocabulary& v, const Corpus& corpus, int threads = 1);
/// Non-overlapping chunks of k residues from the start of each sequence; a
/// shorter final chunk is kept. Terms are the distinct chunks, sorted.
TermEncoding kmer_encoding(const Corpus& corpus, std::size_t k);

struct DocTermParams {
  GoAspect aspect = GoAspect::MF;
  std::size_t min_proteins = 100;
  std::size_t undersample_cap = 0;  // 0 keeps every protein
  std::uint64_t seed = 0;
};

/// Classes of one aspect with their member documents.
struct ClassSet {
  std::vector<std::string> classes;                     // sorted GO ids
  std::vector<std::vector<std::uint32_t>> members;      // doc indices per class, ascending
};

struct AspectData {
  DocTermMatrix dtm;
  ClassSet classes;
};

/// Keeps GO terms of the aspect annotated to at least min_proteins corpus
/// proteins, undersamples larger terms to undersample_cap members, and
/// builds count rows for every protein left in some class.
/// LookupError for proteins absent from the encoding; ValidationError when
/// no class survives.
AspectData build_doc_term(const TermEncoding& enc, const std::vector<GoAnnotation>& annotations,
                          const DocTermParams& params);

enum class Relation { Hierarchical, MutationalParentChild, Sibling };

struct AdjacencyWeights {
  double alpha = 1;  // hierarchical parent and child
  double beta = 3;   // mutational siblings
  double theta = 2;  // mutational parent and child
  /// Highest priority first, used when one unit pair has several relations.
  std::array<Relation, 3> precedence{Relation::Sibling, Relation::MutationalParentChild, Relation::Hierarchical};
};

/// Symmetric sparse adjacency over unit ids with a zero diagonal.
struct GenealogyGraph {
  std::vector<SparseRow> adj;

  std::size_t size() const { return adj.size(); }
  double at(std::uint32_t i, std::uint32_t j) const;
};

GenealogyGraph build_adjacency(const Vocabulary& v, const AdjacencyWeights& w = {});

/// D' = D ((1 - lambda) I + lambda A).
DocTermMatrix smooth(const DocTermMatrix& dtm, const GenealogyGraph& g, double lambda = 0.5);

struct CTfIdfModel {
  std::vector<std::string> classes;
  std::vector<std::string> terms;
  std::vector<SparseRow> vectors;           // one per class
  std::vector<std::string> empty_classes;   // classes with zero total count
  std::size_t n_docs = 0;
  std::string log_base = "e";
};

/// value(t, c) = f_t^c / sum_t' f_t'^c * ln(1 + m / sum_c' f_t^c').
CTfIdfModel ctfidf(const DocTermMatrix& dtm, const ClassSet& classes);

struct TopUnit {
  std::string go_id;
  std::size_t rank = 0;
  std::string term;
  double value = 0;
};

/// Per class, the highest-valued ceil(fraction * |terms|) terms with a
/// positive value; ties by term string.
std::vector<TopUnit> top_units(const CTfIdfModel& model, double fraction = 0.01);
void write_top_units_csv(std::ostream& out, const std::vector<TopUnit>& rows);

using Embeddings = std::map<std::string, std::vector<double>>;

/// "protein_id v1 v2 ..." lines; uniform dimension, unique ids.
Embeddings load_embeddings(std::string_view text);
Embeddings read_embeddings(const std::filesystem::path& path);
void write_embeddings(std::ostream& out, const Embeddings& e);

struct TermVectors {
  std::vector<std::string> terms;
  std::vector<std::vector<double>> vectors;
  std::vector<std::pair<std::string, std::string>> missing;  // (go_id, protein_id)
};

/// Mean member embedding per class; a class is skipped when any member lacks
/// a vector. ValidationError on inconsistent dimensions.
TermVectors embed_go_vectors(const Embeddings& e, const std::vector<std::string>& classes,
                             const std::vector<std::vector<std::string>>& members);
/// Same, taking class membership from an aspect's class set.
TermVectors embed_go_vectors(const Embeddings& e, const AspectData& data);

/// Dense class vectors of a model.
TermVectors model_vectors(const CTfIdfModel& model);

/// Spearman correlation (average ranks for ties) of two value lists.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationResult {
  double rho = 0;
  std::size_t terms_used = 0;
  std::vector<std::string> excluded;  // zero vectors
};

/// Pairwise cosine similarities within each set, correlated over the strict
/// upper triangle. Terms are matched by name; at least 3 must remain.
CorrelationResult similarity_correlation(const TermVectors& a, const TermVectors& b);

}  // namespace puma
