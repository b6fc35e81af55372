#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "puma/corpus.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

struct VocabStats {
  std::map<std::size_t, std::size_t> family_size_histogram;  // families of size >= 2
  std::size_t family_count = 0;                               // families of size >= 2
  std::size_t singleton_count = 0;
  double family_coverage = 0;      // units inside families of size >= 2
  double mutated_ratio_vocab = 0;  // units with a mutational parent
  double unit_length_mean = 0;
  double unit_length_var = 0;  // population variance
  // Filled only when a corpus is supplied; weighted by occurrences in its encoding.
  std::optional<double> mutated_ratio_observed;
  std::optional<double> observed_length_mean;
  std::optional<double> observed_length_var;
  std::uint64_t observed_occurrences = 0;
};

/// Occurrence count of every unit id in the encoding of `corpus`.
std::vector<std::uint64_t> unit_occurrences(const Vocabulary& v, const Corpus& corpus, int threads = 1);

VocabStats vocab_stats(const Vocabulary& v, const Corpus* corpus = nullptr, int threads = 1);

struct IdentityResult {
  double value = 0;
  std::size_t shared = 0;
  bool size_mismatch = false;  // normalised by the smaller size
};

/// Shared unit strings over |a| (over min(|a|, |b|) when sizes differ).
IdentityResult vocab_identity(const std::vector<std::string>& a, const std::vector<std::string>& b);
IdentityResult vocab_identity(const Vocabulary& a, const Vocabulary& b);

std::vector<std::string> unit_strings(const Vocabulary& v);

struct ZipfRow {
  std::size_t rank = 0;
  std::string unit;
  std::uint64_t frequency = 0;
};

/// Every unit by descending occurrence count, ties alphabetical; ranks from 1.
std::vector<ZipfRow> zipf_table(const Vocabulary& v, const std::vector<std::uint64_t>& occurrences);
std::vector<ZipfRow> zipf_table(const Vocabulary& v, const Corpus& corpus, int threads = 1);

/// Fraction of unit occurrences whose string is also a unit of `other`.
double shared_usage_ratio(const Vocabulary& v, const std::vector<std::uint64_t>& occurrences,
                          const std::vector<std::string>& other);

/// Random baseline: length-1 units are copied from the reference, every
/// longer unit is replaced by a uniform string over the 20 standard residues
/// of the same length. Strings are unique; output follows reference order.
std::vector<std::string> random_vocabulary(const Vocabulary& reference, std::uint64_t seed);

/// Reads a unit list (one string per line) or a vocabulary file.
std::vector<std::string> load_unit_strings(const std::filesystem::path& path);

void write_family_histogram_csv(std::ostream& out, const VocabStats& s);
void write_stats_csv(std::ostream& out, const VocabStats& s, std::optional<double> shared_usage = std::nullopt);
void write_zipf_csv(std::ostream& out, const std::vector<ZipfRow>& rows);
/// Square matrix with a header row of names; cell (i, j) = identity(i, j).
void write_identity_csv(std::ostream& out, const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& identity);

}  // namespace puma
