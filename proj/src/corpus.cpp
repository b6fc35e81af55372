#include "puma/corpus.hpp"

#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

#include "puma/error.hpp"
#include "puma/matrix.hpp"

namespace puma {

std::set<char> Corpus::alphabet() const {
  std::set<char> out;
  for (const auto& r : records) out.insert(r.seq.begin(), r.seq.end());
  return out;
}

std::size_t Corpus::residue_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.seq.size();
  return n;
}

Corpus load_fasta(std::string_view text) {
  Corpus corpus;
  std::size_t line_no = 0;
  std::size_t header_line = 0;
  auto finish = [&] {
    if (!corpus.records.empty() && corpus.records.back().seq.empty()) {
      throw ParseError("line " + std::to_string(header_line) + ": empty sequence for '" + corpus.records.back().id + "'");
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.front() == '>') {
      finish();
      std::string_view rest = line.substr(1);
      std::size_t b = 0;
      while (b < rest.size() && std::isspace(static_cast<unsigned char>(rest[b]))) ++b;
      std::size_t e = b;
      while (e < rest.size() && !std::isspace(static_cast<unsigned char>(rest[e]))) ++e;
      if (e == b) throw ParseError("line " + std::to_string(line_no) + ": header without an identifier");
      corpus.records.push_back({std::string(rest.substr(b, e - b)), {}});
      header_line = line_no;
      continue;
    }
    bool has_data = false;
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (corpus.records.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": sequence data before any '>' header");
      }
      has_data = true;
      corpus.records.back().seq.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    (void)has_data;
  }
  finish();
  return corpus;
}

Corpus read_fasta(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open FASTA file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_fasta(buf.str());
}

void write_fasta(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.records) out << '>' << r.id << '\n' << r.seq << '\n';
}

FilterResult filter_corpus(const Corpus& corpus, std::size_t max_len) {
  FilterResult result;
  for (const auto& r : corpus.records) {
    if (r.seq.size() > max_len) {
      result.rejected.push_back({r.id, "length " + std::to_string(r.seq.size()) + " exceeds " + std::to_string(max_len)});
      continue;
    }
    std::size_t nonstandard = 0;
    for (char c : r.seq) nonstandard += is_standard_residue(c) ? 0 : 1;
    if (nonstandard > 1) {
      result.rejected.push_back({r.id, std::to_string(nonstandard) + " non-standard residues"});
      continue;
    }
    result.kept.records.push_back(r);
  }
  return result;
}

void write_rejections(std::ostream& out, const std::vector<Rejection>& rejected) {
  out << "id\treason\n";
  for (const auto& r : rejected) out << r.id << '\t' << r.reason << '\n';
}

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& r : corpus.records) {
    for (unsigned char c : r.seq) {
      h ^= c;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace puma
