#include "puma/variant_eval.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <random>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "puma/error.hpp"
#include "puma/matrix.hpp"
#include "puma/parallel.hpp"
#include "puma/segmenter.hpp"
#include "puma/text_io.hpp"

namespace puma {

using ordered_json = nlohmann::ordered_json;

std::string VariantRecord::mutated() const {
  std::string s = sequence;
  s[pos - 1] = alt;
  return s;
}

namespace {

char residue_field(std::string_view field, std::string_view what, std::size_t line) {
  const auto f = trim(field);
  if (f.size() != 1 || !std::isalpha(static_cast<unsigned char>(f[0]))) {
    throw ParseError("line " + std::to_string(line) + ": " + std::string(what) + " must be a single residue, got '" +
                     std::string(f) + "'");
  }
  return static_cast<char>(std::toupper(static_cast<unsigned char>(f[0])));
}

std::unordered_map<std::string, std::size_t> index_by_id(const Corpus& c) {
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    if (!idx.emplace(c.records[i].id, i).second) {
      throw ValidationError("sequence id '" + c.records[i].id + "' occurs more than once");
    }
  }
  return idx;
}

}  // namespace

VariantSet load_variants(std::string_view tsv, const Corpus& sequences) {
  const auto by_id = index_by_id(sequences);
  const auto lines = split_lines(tsv);
  VariantSet out;
  std::size_t col_id = 0, col_pos = 0, col_ref = 0, col_alt = 0, col_label = 0, n_cols = 0;
  bool have_header = false;
  std::unordered_set<std::string> seen;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    if (trim(lines[li]).empty() || lines[li].front() == '#') continue;
    const auto fields = split(lines[li], '\t');
    if (!have_header) {
      auto column = [&](std::string_view name) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          if (trim(fields[i]) == name) return i;
        }
        throw ParseError("variant table header lacks the '" + std::string(name) + "' column");
      };
      col_id = column("seq_id");
      col_pos = column("pos");
      col_ref = column("ref");
      col_alt = column("alt");
      col_label = column("label");
      n_cols = fields.size();
      have_header = true;
      continue;
    }
    if (fields.size() != n_cols) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const std::string seq_id(trim(fields[col_id]));
    const auto it = by_id.find(seq_id);
    if (it == by_id.end()) {
      throw LookupError("line " + std::to_string(line_no) + ": sequence '" + seq_id + "' is not in the FASTA file");
    }
    const auto pos = parse_int(trim(fields[col_pos]), "line " + std::to_string(line_no) + " pos");
    VariantRecord rec;
    rec.seq_id = seq_id;
    rec.ref = residue_field(fields[col_ref], "ref", line_no);
    rec.alt = residue_field(fields[col_alt], "alt", line_no);
    rec.label = std::string(trim(fields[col_label]));
    const std::string& seq = sequences.records[it->second].seq;
    if (pos < 1 || static_cast<std::size_t>(pos) > seq.size()) {
      out.rejected.push_back({line_no, seq_id, "position " + std::to_string(pos) + " outside sequence of length " +
                                                   std::to_string(seq.size())});
      continue;
    }
    rec.pos = static_cast<std::size_t>(pos);
    if (seq[rec.pos - 1] != rec.ref) {
      out.rejected.push_back({line_no, seq_id, std::string("reference ") + rec.ref + " does not match residue " +
                                                   seq[rec.pos - 1] + " at position " + std::to_string(pos)});
      continue;
    }
    if (rec.alt == rec.ref) {
      out.rejected.push_back({line_no, seq_id, "alternative equals reference"});
      continue;
    }
    if (!seen.insert(seq_id + '\t' + std::to_string(rec.pos) + '\t' + rec.alt).second) {
      ++out.duplicates;
      continue;
    }
    rec.sequence = seq;
    out.records.push_back(std::move(rec));
  }
  if (!have_header) throw ParseError("variant table is empty");
  return out;
}

VariantSet read_variants(const std::filesystem::path& tsv, const std::filesystem::path& fasta) {
  return load_variants(read_file(tsv), read_fasta(fasta));
}

void write_variants(std::ostream& out, const std::vector<VariantRecord>& records) {
  out << "seq_id\tpos\tref\talt\tlabel\n";
  for (const auto& r : records) out << r.seq_id << '\t' << r.pos << '\t' << r.ref << '\t' << r.alt << '\t' << r.label << '\n';
}

void write_variant_rejections(std::ostream& out, const std::vector<VariantRejection>& rejected) {
  out << "line\tseq_id\treason\n";
  for (const auto& r : rejected) out << r.line << '\t' << r.seq_id << '\t' << r.reason << '\n';
}

SiblingReport same_sibling_rate(const Vocabulary& v, const std::vector<VariantRecord>& records, int threads) {
  const Segmenter seg(v);
  SiblingReport report;
  report.outcomes.resize(records.size());
  parallel_for(records.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& r = records[i];
      auto& o = report.outcomes[i];
      o.seq_id = r.seq_id;
      o.pos = r.pos;
      o.ref = r.ref;
      o.alt = r.alt;
      o.label = r.label;
      o.original_unit = seg.unit_at(r.sequence, r.pos).unit;
      o.mutated_unit = seg.unit_at(r.mutated(), r.pos).unit;
      o.event = v.same_family(o.original_unit, o.mutated_unit) && v.family_size(o.original_unit) >= 2;
    }
  });
  std::sort(report.outcomes.begin(), report.outcomes.end(), [](const SiblingOutcome& a, const SiblingOutcome& b) {
    return std::tie(a.seq_id, a.pos, a.alt, a.label) < std::tie(b.seq_id, b.pos, b.alt, b.label);
  });
  std::map<std::string, LabelRate> by_label;
  for (const auto& o : report.outcomes) {
    auto& lr = by_label[o.label];
    lr.label = o.label;
    ++lr.records;
    if (o.event) ++lr.events;
  }
  for (auto& [label, lr] : by_label) {
    lr.rate = static_cast<double>(lr.events) / static_cast<double>(lr.records);
    report.by_label.push_back(lr);
  }
  return report;
}

void write_rate_table_csv(std::ostream& out, const SiblingReport& report) {
  out << "label,records,events,rate\n";
  for (const auto& r : report.by_label) out << csv_field(r.label) << ',' << r.records << ',' << r.events << ',' << format_double(r.rate) << '\n';
}

void write_outcomes_tsv(std::ostream& out, const Vocabulary& v, const SiblingReport& report) {
  out << "seq_id\tpos\tref\talt\tlabel\toriginal_unit\tmutated_unit\tsame_sibling\n";
  for (const auto& o : report.outcomes) {
    out << o.seq_id << '\t' << o.pos << '\t' << o.ref << '\t' << o.alt << '\t' << o.label << '\t' << v.str(o.original_unit)
        << '\t' << v.str(o.mutated_unit) << '\t' << (o.event ? 1 : 0) << '\n';
  }
}

std::vector<VariantRecord> random_variants(const Corpus& corpus, std::size_t n, std::uint64_t seed) {
  std::vector<VariantRecord> out;
  if (n == 0) return out;
  if (corpus.empty()) throw ValidationError("cannot draw variants from an empty corpus");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_seq(0, corpus.size() - 1);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = corpus.records[pick_seq(rng)];
    std::uniform_int_distribution<std::size_t> pick_pos(1, rec.seq.size());
    const std::size_t pos = pick_pos(rng);
    const char ref = rec.seq[pos - 1];
    std::string choices;
    for (char c : kStandardResidues) {
      if (c != ref) choices.push_back(c);
    }
    std::uniform_int_distribution<std::size_t> pick_alt(0, choices.size() - 1);
    out.push_back({rec.id, rec.seq, pos, ref, choices[pick_alt(rng)], "Random"});
  }
  return out;
}

namespace {

struct SingleSub {
  UnitId sibling;
  std::size_t offset;  // 0-based position inside the unit
};

// Units grouped by (length, offset, string with the offset blanked), each
// group in insertion order.
class OneOffIndex {
 public:
  explicit OneOffIndex(const Vocabulary& v) {
    for (const auto& u : v.units()) {
      for (std::size_t j = 0; j < u.string.size(); ++j) groups_[key(u.string, j)].push_back(u.id);
    }
  }
  const std::vector<UnitId>* find(const std::string& s, std::size_t j) const {
    auto it = groups_.find(key(s, j));
    return it == groups_.end() ? nullptr : &it->second;
  }

 private:
  static std::string key(const std::string& s, std::size_t j) {
    std::string k = s;
    k[j] = '\0';
    k += '#';
    k += std::to_string(j);
    return k;
  }
  std::unordered_map<std::string, std::vector<UnitId>> groups_;
};

std::vector<SingleSub> single_sub_siblings(const Vocabulary& v, UnitId u) {
  std::vector<SingleSub> out;
  const std::string& s = v.str(u);
  for (UnitId m : v.family_of(u)) {
    if (m == u) continue;
    const std::string& t = v.str(m);
    if (t.size() != s.size()) continue;
    std::size_t diffs = 0, where = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] != t[j]) {
        ++diffs;
        where = j;
      }
    }
    if (diffs == 1) out.push_back({m, where});
  }
  return out;
}

struct Alternative {
  char residue;
  std::string unit;
};

std::optional<Alternative> pick_alternative(const Vocabulary& v, const SubstitutionMatrix& m, const OneOffIndex& index,
                                            UnitId u, const SingleSub& sib, const QueryOptions& opts) {
  const std::string& us = v.str(u);
  const std::size_t j = sib.offset;
  const char ru = us[j];
  const char rm = v.str(sib.sibling)[j];
  if (!m.has(ru) || !m.has(rm)) return std::nullopt;
  const int sib_score = m.score_unchecked(ru, rm);
  const auto family = v.family_of(u);
  auto in_family = [&](UnitId w) { return std::binary_search(family.begin(), family.end(), w); };
  const auto sib_insertion = v.unit(sib.sibling).insertion_index;

  if (opts.vocab_constraint) {
    const auto* group = index.find(us, j);
    if (group == nullptr) return std::nullopt;
    for (UnitId w : *group) {
      const char rw = v.str(w)[j];
      if (rw == ru || in_family(w) || !m.has(rw)) continue;
      if (m.score_unchecked(ru, rw) < sib_score) continue;
      if (opts.order_constraint && v.unit(w).insertion_index <= sib_insertion) continue;
      return Alternative{rw, v.str(w)};
    }
    return std::nullopt;
  }

  std::vector<char> residues(kStandardResidues.begin(), kStandardResidues.end());
  std::erase_if(residues, [&](char x) { return !m.has(x); });
  std::stable_sort(residues.begin(), residues.end(),
                   [&](char a, char b) { return m.score_unchecked(ru, a) > m.score_unchecked(ru, b); });
  for (char rw : residues) {
    if (rw == ru || rw == rm || m.score_unchecked(ru, rw) < sib_score) continue;
    std::string w = us;
    w[j] = rw;
    if (const auto id = v.find(w)) {
      if (in_family(*id)) continue;
      if (opts.order_constraint && v.unit(*id).insertion_index <= sib_insertion) continue;
    }
    return Alternative{rw, std::move(w)};
  }
  return std::nullopt;
}

}  // namespace

QuerySet gen_plm_queries(const Vocabulary& v, const Corpus& corpus, const QueryOptions& opts) {
  const auto& m = SubstitutionMatrix::resolve(v.meta().matrix);
  const Segmenter seg(v);
  const OneOffIndex index(v);
  std::vector<std::vector<SingleSub>> sibs(v.size());
  for (const auto& u : v.units()) {
    if (v.family_size(u.id) >= 2) sibs[u.id] = single_sub_siblings(v, u.id);
  }

  std::vector<QuerySet> per_seq(corpus.size());
  parallel_for(corpus.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto& rec = corpus.records[r];
      auto& out = per_seq[r];
      std::size_t offset = 0;
      for (UnitId u : seg.encode(rec.seq)) {
        const std::string& us = v.str(u);
        const std::size_t unit_begin = offset + 1;
        offset += us.size();
        if (v.family_size(u) < 2) continue;
        if (sibs[u].empty()) {
          out.skipped.push_back({rec.id, unit_begin, us, "no-single-substitution-sibling"});
          continue;
        }
        for (const auto& sib : sibs[u]) {
          const auto alt = pick_alternative(v, m, index, u, sib, opts);
          if (!alt) {
            out.skipped.push_back({rec.id, unit_begin, us, "no-qualifying-alternative"});
            continue;
          }
          MaskedQuery q;
          q.seq_id = rec.id;
          q.sequence = rec.seq;
          q.mask_pos = unit_begin + sib.offset;
          q.original_residue = us[sib.offset];
          q.sib_residue = v.str(sib.sibling)[sib.offset];
          q.alt_residue = alt->residue;
          q.unit = us;
          q.sibling_unit = v.str(sib.sibling);
          q.alt_unit = alt->unit;
          out.queries.push_back(std::move(q));
        }
      }
    }
  });

  QuerySet all;
  std::mt19937_64 rng(opts.seed);
  for (auto& part : per_seq) {
    for (auto& q : part.queries) {
      q.query_id = "q" + std::to_string(all.queries.size() + 1);
      std::string choices;
      for (char c : kStandardResidues) {
        if (c != q.original_residue && c != q.sib_residue) choices.push_back(c);
      }
      std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
      q.random_residue = choices[pick(rng)];
      all.queries.push_back(std::move(q));
    }
    for (auto& s : part.skipped) all.skipped.push_back(std::move(s));
  }
  return all;
}

void write_queries(std::ostream& out, const std::vector<MaskedQuery>& queries) {
  for (const auto& q : queries) {
    ordered_json j;
    j["query_id"] = q.query_id;
    j["seq_id"] = q.seq_id;
    j["sequence"] = q.sequence;
    j["mask_pos"] = q.mask_pos;
    j["original_residue"] = std::string(1, q.original_residue);
    j["sib_residue"] = std::string(1, q.sib_residue);
    j["alt_residue"] = std::string(1, q.alt_residue);
    j["random_residue"] = std::string(1, q.random_residue);
    j["unit"] = q.unit;
    j["sibling_unit"] = q.sibling_unit;
    j["alt_unit"] = q.alt_unit;
    out << j.dump() << '\n';
  }
}

namespace {

char residue_of(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw ParseError("line " + std::to_string(line) + ": missing field '" + key + "'");
  const auto s = j.at(key).get<std::string>();
  if (s.size() != 1) throw ParseError("line " + std::to_string(line) + ": field '" + key + "' must be one residue");
  return s[0];
}

template <class Fn>
void for_each_json_line(std::string_view text, Fn&& fn) {
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    try {
      fn(j, i + 1);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<MaskedQuery> read_queries(std::string_view jsonl) {
  std::vector<MaskedQuery> out;
  for_each_json_line(jsonl, [&](const nlohmann::json& j, std::size_t line) {
    MaskedQuery q;
    q.query_id = j.at("query_id").get<std::string>();
    q.seq_id = j.value("seq_id", std::string());
    q.sequence = j.at("sequence").get<std::string>();
    q.mask_pos = j.at("mask_pos").get<std::size_t>();
    q.sib_residue = residue_of(j, "sib_residue", line);
    q.alt_residue = residue_of(j, "alt_residue", line);
    q.original_residue = residue_of(j, "original_residue", line);
    if (j.contains("random_residue")) q.random_residue = residue_of(j, "random_residue", line);
    q.unit = j.value("unit", std::string());
    q.sibling_unit = j.value("sibling_unit", std::string());
    q.alt_unit = j.value("alt_unit", std::string());
    if (q.mask_pos < 1 || q.mask_pos > q.sequence.size()) {
      throw ParseError("line " + std::to_string(line) + ": mask_pos outside the sequence");
    }
    if (q.sib_residue == q.alt_residue) {
      throw ParseError("line " + std::to_string(line) + ": sibling and alternative residues are equal");
    }
    out.push_back(std::move(q));
  });
  return out;
}

void write_skipped_tsv(std::ostream& out, const std::vector<SkippedOccurrence>& skipped) {
  out << "seq_id\tunit_begin\tunit\treason\n";
  for (const auto& s : skipped) out << s.seq_id << '\t' << s.unit_begin << '\t' << s.unit << '\t' << s.reason << '\n';
}

LogitTable read_logits(std::string_view jsonl) {
  LogitTable out;
  for_each_json_line(jsonl, [&](const nlohmann::json& j, std::size_t line) {
    const auto id = j.at("query_id").get<std::string>();
    std::map<char, double> row;
    for (const auto& [k, val] : j.at("logits").items()) {
      if (k.size() != 1) throw ParseError("line " + std::to_string(line) + ": logit key '" + k + "' is not one residue");
      row[k[0]] = val.get<double>();
    }
    if (!out.emplace(id, std::move(row)).second) {
      throw ParseError("line " + std::to_string(line) + ": duplicate query_id '" + id + "'");
    }
  });
  return out;
}

void write_logits(std::ostream& out, const std::vector<std::pair<std::string, std::map<char, double>>>& rows) {
  for (const auto& [id, logits] : rows) {
    ordered_json j;
    j["query_id"] = id;
    ordered_json l = ordered_json::object();
    for (const auto& [res, value] : logits) l[std::string(1, res)] = value;
    j["logits"] = std::move(l);
    out << j.dump() << '\n';
  }
}

double win(double a, double b) {
  if (a > b) return 1.0;
  if (a == b) return 0.5;
  return 0.0;
}

namespace {

void add_win(PairwiseRate& r, double a, double b) {
  r.half_points += a > b ? 2 : (a == b ? 1 : 0);
  ++r.n;
}

void finish(PairwiseRate& r) {
  r.rate = r.n == 0 ? 0.0 : static_cast<double>(r.half_points) / static_cast<double>(2 * r.n);
}

}  // namespace

WinRateReport compute_win_rate(const std::vector<MaskedQuery>& queries, const LogitTable& logits) {
  WinRateReport report;
  PairwiseRate vs_orig, vs_rand;
  bool have_orig = true, have_rand = true;
  for (const auto& q : queries) {
    const auto it = logits.find(q.query_id);
    if (it == logits.end()) throw LookupError("query '" + q.query_id + "' has no logits");
    const auto& row = it->second;
    auto logit = [&](char res) {
      const auto r = row.find(res);
      if (r == row.end()) {
        throw LookupError("query '" + q.query_id + "' has no logit for residue " + std::string(1, res));
      }
      return r->second;
    };
    const double s = logit(q.sib_residue);
    const double a = logit(q.alt_residue);
    add_win(report.sibling_vs_alternative, s, a);
    report.per_query.push_back({q.query_id, s, a, win(s, a)});
    if (have_orig && row.count(q.original_residue)) {
      add_win(vs_orig, s, row.at(q.original_residue));
    } else {
      have_orig = false;
    }
    if (have_rand && q.random_residue != 0 && row.count(q.random_residue)) {
      add_win(vs_rand, s, row.at(q.random_residue));
    } else {
      have_rand = false;
    }
  }
  finish(report.sibling_vs_alternative);
  if (have_orig && !queries.empty()) {
    finish(vs_orig);
    report.mutation_vs_original = vs_orig;
  }
  if (have_rand && !queries.empty()) {
    finish(vs_rand);
    report.mutation_vs_random = vs_rand;
  }
  return report;
}

void write_win_table_tsv(std::ostream& out, const WinRateReport& report) {
  out << "query_id\tsib_logit\talt_logit\twin\n";
  for (const auto& w : report.per_query) {
    out << w.query_id << '\t' << format_double(w.sib_logit) << '\t' << format_double(w.alt_logit) << '\t'
        << format_double(w.win) << '\n';
  }
}

}  // namespace puma
