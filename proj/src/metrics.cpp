#include "puma/metrics.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "puma/error.hpp"
#include "puma/matrix.hpp"
#include "puma/parallel.hpp"
#include "puma/segmenter.hpp"
#include "puma/text_io.hpp"

namespace puma {

namespace {

struct Moments {
  double mean = 0;
  double var = 0;
};

// Weighted mean and population variance of lengths.
Moments length_moments(const Vocabulary& v, const std::vector<std::uint64_t>& weights) {
  long double total = 0, sum = 0, sq = 0;
  for (const auto& u : v.units()) {
    const long double w = static_cast<long double>(weights[u.id]);
    const long double len = static_cast<long double>(u.string.size());
    total += w;
    sum += w * len;
    sq += w * len * len;
  }
  if (total == 0) return {};
  const long double mean = sum / total;
  return {static_cast<double>(mean), static_cast<double>(std::max<long double>(0, sq / total - mean * mean))};
}

}  // namespace

std::vector<std::uint64_t> unit_occurrences(const Vocabulary& v, const Corpus& corpus, int threads) {
  const Segmenter seg(v);
  const std::size_t n = corpus.size();
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::vector<std::uint64_t>> partial(std::min(workers, std::max<std::size_t>(n, 1)),
                                                  std::vector<std::uint64_t>(v.size(), 0));
  const std::size_t chunk = (n + partial.size() - 1) / partial.size();
  parallel_for(partial.size(), static_cast<int>(partial.size()), [&](std::size_t wb, std::size_t we) {
    for (std::size_t w = wb; w < we; ++w) {
      for (std::size_t r = w * chunk; r < std::min(n, (w + 1) * chunk); ++r) {
        for (UnitId id : seg.encode(corpus.records[r].seq)) ++partial[w][id];
      }
    }
  });
  std::vector<std::uint64_t> out(v.size(), 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += p[i];
  }
  return out;
}

VocabStats vocab_stats(const Vocabulary& v, const Corpus* corpus, int threads) {
  VocabStats s;
  const std::size_t n = v.size();
  if (n == 0) return s;
  std::size_t in_families = 0, mutated = 0;
  for (const auto& u : v.units()) {
    if (u.mut_parent) {
      ++mutated;
      continue;
    }
    const std::size_t size = 1 + v.children(u.id).size();
    if (size >= 2) {
      ++s.family_size_histogram[size];
      ++s.family_count;
      in_families += size;
    } else {
      ++s.singleton_count;
    }
  }
  s.family_coverage = static_cast<double>(in_families) / static_cast<double>(n);
  s.mutated_ratio_vocab = static_cast<double>(mutated) / static_cast<double>(n);
  const auto m = length_moments(v, std::vector<std::uint64_t>(n, 1));
  s.unit_length_mean = m.mean;
  s.unit_length_var = m.var;

  if (corpus != nullptr) {
    const auto occ = unit_occurrences(v, *corpus, threads);
    std::uint64_t total = 0, mutated_occ = 0;
    for (const auto& u : v.units()) {
      total += occ[u.id];
      if (u.mut_parent) mutated_occ += occ[u.id];
    }
    s.observed_occurrences = total;
    s.mutated_ratio_observed = total == 0 ? 0.0 : static_cast<double>(mutated_occ) / static_cast<double>(total);
    const auto om = length_moments(v, occ);
    s.observed_length_mean = om.mean;
    s.observed_length_var = om.var;
  }
  return s;
}

IdentityResult vocab_identity(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  IdentityResult r;
  if (a.empty() || b.empty()) return r;
  const std::unordered_set<std::string> bs(b.begin(), b.end());
  const std::unordered_set<std::string> as(a.begin(), a.end());
  for (const auto& s : as) r.shared += bs.count(s);
  r.size_mismatch = a.size() != b.size();
  const std::size_t denom = std::min(a.size(), b.size());
  r.value = static_cast<double>(r.shared) / static_cast<double>(denom);
  return r;
}

IdentityResult vocab_identity(const Vocabulary& a, const Vocabulary& b) {
  return vocab_identity(unit_strings(a), unit_strings(b));
}

std::vector<std::string> unit_strings(const Vocabulary& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& u : v.units()) out.push_back(u.string);
  return out;
}

std::vector<ZipfRow> zipf_table(const Vocabulary& v, const std::vector<std::uint64_t>& occurrences) {
  if (occurrences.size() != v.size()) throw ValidationError("occurrence table does not match the vocabulary size");
  std::vector<ZipfRow> rows;
  rows.reserve(v.size());
  for (const auto& u : v.units()) rows.push_back({0, u.string, occurrences[u.id]});
  std::sort(rows.begin(), rows.end(), [](const ZipfRow& x, const ZipfRow& y) {
    return x.frequency != y.frequency ? x.frequency > y.frequency : x.unit < y.unit;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
  return rows;
}

std::vector<ZipfRow> zipf_table(const Vocabulary& v, const Corpus& corpus, int threads) {
  return zipf_table(v, unit_occurrences(v, corpus, threads));
}

double shared_usage_ratio(const Vocabulary& v, const std::vector<std::uint64_t>& occurrences,
                          const std::vector<std::string>& other) {
  if (occurrences.size() != v.size()) throw ValidationError("occurrence table does not match the vocabulary size");
  const std::unordered_set<std::string> os(other.begin(), other.end());
  std::uint64_t total = 0, shared = 0;
  for (const auto& u : v.units()) {
    total += occurrences[u.id];
    if (os.count(u.string)) shared += occurrences[u.id];
  }
  return total == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(total);
}

std::vector<std::string> random_vocabulary(const Vocabulary& reference, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kStandardResidues.size() - 1);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& u : reference.units()) {
    if (u.string.size() == 1) {
      out.push_back(u.string);
      seen.insert(u.string);
    }
  }
  for (const auto& u : reference.units()) {
    if (u.string.size() == 1) continue;
    std::string s(u.string.size(), 'A');
    // there are at least 20^2 strings per length >= 2, far more than any
    // vocabulary holds at short lengths, so resampling terminates
    do {
      for (char& c : s) c = kStandardResidues[pick(rng)];
    } while (!seen.insert(s).second);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> load_unit_strings(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    std::istringstream in(text);
    return unit_strings(Vocabulary::read(in));
  }
  std::vector<std::string> out;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

void write_family_histogram_csv(std::ostream& out, const VocabStats& s) {
  out << "family_size,count\n";
  out << "1," << s.singleton_count << '\n';
  for (const auto& [size, count] : s.family_size_histogram) out << size << ',' << count << '\n';
}

void write_stats_csv(std::ostream& out, const VocabStats& s, std::optional<double> shared_usage) {
  out << "metric,value\n";
  out << "family_count," << s.family_count << '\n';
  out << "singleton_count," << s.singleton_count << '\n';
  out << "family_coverage," << format_double(s.family_coverage) << '\n';
  out << "mutated_ratio_vocab," << format_double(s.mutated_ratio_vocab) << '\n';
  out << "unit_length_mean," << format_double(s.unit_length_mean) << '\n';
  out << "unit_length_var," << format_double(s.unit_length_var) << '\n';
  if (s.mutated_ratio_observed) {
    out << "observed_occurrences," << s.observed_occurrences << '\n';
    out << "mutated_ratio_observed," << format_double(*s.mutated_ratio_observed) << '\n';
    out << "observed_length_mean," << format_double(*s.observed_length_mean) << '\n';
    out << "observed_length_var," << format_double(*s.observed_length_var) << '\n';
  }
  if (shared_usage) out << "shared_usage_ratio," << format_double(*shared_usage) << '\n';
}

void write_zipf_csv(std::ostream& out, const std::vector<ZipfRow>& rows) {
  out << "rank,unit,frequency\n";
  for (const auto& r : rows) out << r.rank << ',' << r.unit << ',' << r.frequency << '\n';
}

void write_identity_csv(std::ostream& out, const std::vector<std::string>& names,
                        const std::vector<std::vector<double>>& identity) {
  out << "vocabulary";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << csv_field(names[i]);
    for (double x : identity[i]) out << ',' << format_double(x);
    out << '\n';
  }
}

}  // namespace puma
