#include "puma/topic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include "puma/error.hpp"
#include "puma/parallel.hpp"
#include "puma/segmenter.hpp"
#include "puma/text_io.hpp"

namespace puma {

GoAspect parse_aspect(std::string_view s) {
  if (s == "MF" || s == "F") return GoAspect::MF;
  if (s == "BP" || s == "P") return GoAspect::BP;
  if (s == "CC" || s == "C") return GoAspect::CC;
  throw ParseError("unknown GO aspect '" + std::string(s) + "' (expected MF, BP or CC)");
}

const char* to_string(GoAspect a) {
  switch (a) {
    case GoAspect::MF:
      return "MF";
    case GoAspect::BP:
      return "BP";
    case GoAspect::CC:
      return "CC";
  }
  return "?";
}

std::vector<GoAnnotation> load_go_annotations(std::string_view tsv) {
  std::vector<GoAnnotation> out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  bool have_header = false;
  std::size_t c_prot = 0, c_go = 0, c_aspect = 0, n_cols = 0;
  const auto lines = split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const auto f = split(lines[i], '\t');
    if (!have_header) {
      auto column = [&](std::string_view name) {
        for (std::size_t k = 0; k < f.size(); ++k) {
          if (trim(f[k]) == name) return k;
        }
        throw ParseError("annotation header lacks the '" + std::string(name) + "' column");
      };
      c_prot = column("protein_id");
      c_go = column("go_id");
      c_aspect = column("aspect");
      n_cols = f.size();
      have_header = true;
      continue;
    }
    if (f.size() != n_cols) {
      throw ParseError("line " + std::to_string(i + 1) + ": expected " + std::to_string(n_cols) + " fields");
    }
    GoAnnotation a{std::string(trim(f[c_prot])), std::string(trim(f[c_go])), GoAspect::MF};
    try {
      a.aspect = parse_aspect(trim(f[c_aspect]));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (seen.emplace(a.protein_id, a.go_id, static_cast<int>(a.aspect)).second) out.push_back(std::move(a));
  }
  return out;
}

std::vector<GoAnnotation> read_go_annotations(const std::filesystem::path& path) {
  return load_go_annotations(read_file(path));
}

std::vector<GoAnnotation> shuffle_annotations(const std::vector<GoAnnotation>& annotations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GoAnnotation> out;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (GoAspect aspect : {GoAspect::MF, GoAspect::BP, GoAspect::CC}) {
    std::vector<const GoAnnotation*> rows;
    for (const auto& a : annotations) {
      if (a.aspect == aspect) rows.push_back(&a);
    }
    std::vector<std::string> proteins;
    for (const auto* a : rows) proteins.push_back(a->protein_id);
    std::shuffle(proteins.begin(), proteins.end(), rng);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      GoAnnotation a{proteins[i], rows[i]->go_id, aspect};
      if (seen.emplace(a.protein_id, a.go_id, static_cast<int>(aspect)).second) out.push_back(std::move(a));
    }
  }
  return out;
}

double DocTermMatrix::at(std::size_t doc, std::uint32_t term) const {
  const auto& row = rows.at(doc);
  auto it = std::lower_bound(row.begin(), row.end(), term, [](const auto& e, std::uint32_t t) { return e.first < t; });
  return it != row.end() && it->first == term ? it->second : 0.0;
}

TermEncoding unit_encoding(const Vocabulary& v, const Corpus& corpus, int threads) {
  TermEncoding enc;
  enc.terms = std::vector<std::string>();
  enc.terms.reserve(v.size());
  for (const auto& u : v.units()) enc.terms.push_back(u.string);
  const Segmenter seg(v);
  enc.docs.resize(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto ids = seg.encode(corpus.records[i].seq);
      enc.docs[i].assign(ids.begin(), ids.end());
    }
  });
  for (const auto& r : corpus.records) enc.doc_ids.push_back(r.id);
  return enc;
}

TermEncoding kmer_encoding(const Corpus& corpus, std::size_t k) {
  if (k == 0) throw ValidationError("k-mer length must be positive");
  std::set<std::string> distinct;
  for (const auto& r : corpus.records) {
    for (std::size_t i = 0; i < r.seq.size(); i += k) distinct.insert(r.seq.substr(i, k));
  }
  TermEncoding enc;
  enc.terms.assign(distinct.begin(), distinct.end());
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < enc.terms.size(); ++i) index.emplace(enc.terms[i], i);
  for (const auto& r : corpus.records) {
    enc.doc_ids.push_back(r.id);
    auto& doc = enc.docs.emplace_back();
    for (std::size_t i = 0; i < r.seq.size(); i += k) doc.push_back(index.at(r.seq.substr(i, k)));
  }
  return enc;
}

AspectData build_doc_term(const TermEncoding& enc, const std::vector<GoAnnotation>& annotations,
                          const DocTermParams& params) {
  std::unordered_map<std::string, std::uint32_t> doc_index;
  for (std::uint32_t i = 0; i < enc.doc_ids.size(); ++i) {
    if (!doc_index.emplace(enc.doc_ids[i], i).second) {
      throw ValidationError("protein id '" + enc.doc_ids[i] + "' occurs more than once");
    }
  }
  std::map<std::string, std::set<std::uint32_t>> by_term;
  for (const auto& a : annotations) {
    if (a.aspect != params.aspect) continue;
    const auto it = doc_index.find(a.protein_id);
    if (it == doc_index.end()) throw LookupError("annotated protein '" + a.protein_id + "' is not in the corpus");
    by_term[a.go_id].insert(it->second);
  }

  std::mt19937_64 rng(params.seed);
  std::vector<std::string> classes;
  std::vector<std::vector<std::uint32_t>> members;  // corpus doc indices
  for (const auto& [go, set] : by_term) {
    if (set.size() < params.min_proteins) continue;
    std::vector<std::uint32_t> m(set.begin(), set.end());
    if (params.undersample_cap > 0 && m.size() > params.undersample_cap) {
      std::shuffle(m.begin(), m.end(), rng);
      m.resize(params.undersample_cap);
      std::sort(m.begin(), m.end());
    }
    classes.push_back(go);
    members.push_back(std::move(m));
  }
  if (classes.empty()) {
    throw ValidationError(std::string("no ") + to_string(params.aspect) + " term has at least " +
                          std::to_string(params.min_proteins) + " annotated proteins");
  }

  std::vector<char> used(enc.doc_ids.size(), 0);
  for (const auto& m : members) {
    for (auto d : m) used[d] = 1;
  }
  std::vector<std::uint32_t> row_of(enc.doc_ids.size(), 0);
  AspectData out;
  out.dtm.terms = enc.terms;
  for (std::uint32_t d = 0; d < enc.doc_ids.size(); ++d) {
    if (!used[d]) continue;
    row_of[d] = static_cast<std::uint32_t>(out.dtm.docs.size());
    out.dtm.docs.push_back(enc.doc_ids[d]);
    std::map<std::uint32_t, double> counts;
    for (auto t : enc.docs[d]) counts[t] += 1.0;
    out.dtm.rows.emplace_back(counts.begin(), counts.end());
  }
  for (auto& m : members) {
    for (auto& d : m) d = row_of[d];
  }
  out.classes.classes = std::move(classes);
  out.classes.members = std::move(members);
  return out;
}

double GenealogyGraph::at(std::uint32_t i, std::uint32_t j) const {
  const auto& row = adj.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j, [](const auto& e, std::uint32_t t) { return e.first < t; });
  return it != row.end() && it->first == j ? it->second : 0.0;
}

GenealogyGraph build_adjacency(const Vocabulary& v, const AdjacencyWeights& w) {
  auto priority = [&](Relation r) {
    return static_cast<int>(std::find(w.precedence.begin(), w.precedence.end(), r) - w.precedence.begin());
  };
  auto weight = [&](Relation r) {
    switch (r) {
      case Relation::Hierarchical:
        return w.alpha;
      case Relation::MutationalParentChild:
        return w.theta;
      case Relation::Sibling:
        return w.beta;
    }
    return 0.0;
  };
  std::unordered_map<std::uint64_t, Relation> rel;
  auto relate = [&](UnitId a, UnitId b, Relation r) {
    if (a == b) return;
    const std::uint64_t k = UnitPair{std::min(a, b), std::max(a, b)}.key();
    auto [it, inserted] = rel.emplace(k, r);
    if (!inserted && priority(r) < priority(it->second)) it->second = r;
  };
  for (const auto& u : v.units()) {
    if (u.hier_parents) {
      relate(u.id, u.hier_parents->left, Relation::Hierarchical);
      relate(u.id, u.hier_parents->right, Relation::Hierarchical);
    }
    if (u.mut_parent) relate(u.id, *u.mut_parent, Relation::MutationalParentChild);
    const auto& kids = v.children(u.id);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (std::size_t j = i + 1; j < kids.size(); ++j) relate(kids[i], kids[j], Relation::Sibling);
    }
  }
  GenealogyGraph g;
  g.adj.resize(v.size());
  for (const auto& [k, r] : rel) {
    const auto p = UnitPair::from_key(k);
    const double x = weight(r);
    if (x == 0) continue;
    g.adj[p.left].emplace_back(p.right, x);
    g.adj[p.right].emplace_back(p.left, x);
  }
  for (auto& row : g.adj) std::sort(row.begin(), row.end());
  return g;
}

DocTermMatrix smooth(const DocTermMatrix& dtm, const GenealogyGraph& g, double lambda) {
  if (g.size() != dtm.n_terms()) {
    throw ValidationError("adjacency has " + std::to_string(g.size()) + " terms but the document-term matrix has " +
                          std::to_string(dtm.n_terms()));
  }
  if (!(lambda >= 0 && lambda <= 1)) throw ValidationError("lambda must lie in [0, 1]");
  DocTermMatrix out;
  out.docs = dtm.docs;
  out.terms = dtm.terms;
  out.rows.resize(dtm.rows.size());
  for (std::size_t d = 0; d < dtm.rows.size(); ++d) {
    std::map<std::uint32_t, double> via_graph;
    for (const auto& [t, x] : dtm.rows[d]) {
      for (const auto& [s, a] : g.adj[t]) via_graph[s] += x * a;
    }
    std::map<std::uint32_t, double> acc;
    for (const auto& [t, x] : dtm.rows[d]) acc[t] = (1 - lambda) * x;
    for (const auto& [s, y] : via_graph) acc[s] += lambda * y;
    for (const auto& [t, x] : acc) {
      if (x != 0) out.rows[d].emplace_back(t, x);
    }
  }
  return out;
}

CTfIdfModel ctfidf(const DocTermMatrix& dtm, const ClassSet& classes) {
  CTfIdfModel model;
  model.classes = classes.classes;
  model.terms = dtm.terms;
  model.n_docs = dtm.n_docs();
  const std::size_t n_terms = dtm.n_terms();
  std::vector<std::map<std::uint32_t, double>> freq(classes.classes.size());
  std::vector<double> term_total(n_terms, 0.0);
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    for (auto d : classes.members[c]) {
      for (const auto& [t, x] : dtm.rows.at(d)) freq[c][t] += x;
    }
    for (const auto& [t, x] : freq[c]) term_total[t] += x;
  }
  const double m = static_cast<double>(model.n_docs);
  model.vectors.resize(classes.classes.size());
  for (std::size_t c = 0; c < classes.classes.size(); ++c) {
    double class_total = 0;
    for (const auto& [t, x] : freq[c]) class_total += x;
    if (class_total == 0) {
      model.empty_classes.push_back(classes.classes[c]);
      continue;
    }
    for (const auto& [t, x] : freq[c]) {
      if (x == 0 || term_total[t] == 0) continue;
      model.vectors[c].emplace_back(t, (x / class_total) * std::log(1 + m / term_total[t]));
    }
  }
  return model;
}

std::vector<TopUnit> top_units(const CTfIdfModel& model, double fraction) {
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(model.terms.size()))));
  std::vector<TopUnit> out;
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<std::pair<std::uint32_t, double>> row;
    for (const auto& e : model.vectors[c]) {
      if (e.second > 0) row.push_back(e);
    }
    std::sort(row.begin(), row.end(), [&](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : model.terms[a.first] < model.terms[b.first];
    });
    for (std::size_t i = 0; i < std::min(keep, row.size()); ++i) {
      out.push_back({model.classes[c], i + 1, model.terms[row[i].first], row[i].second});
    }
  }
  return out;
}

void write_top_units_csv(std::ostream& out, const std::vector<TopUnit>& rows) {
  out << "go_id,rank,unit,value\n";
  for (const auto& r : rows) out << r.go_id << ',' << r.rank << ',' << r.term << ',' << format_double(r.value) << '\n';
}

Embeddings load_embeddings(std::string_view text) {
  Embeddings out;
  std::size_t dim = 0;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto f = split_ws(lines[i]);
    if (f.empty()) continue;
    const std::string where = "line " + std::to_string(i + 1);
    if (f.size() < 2) throw ParseError(where + ": protein id without a vector");
    std::vector<double> v;
    v.reserve(f.size() - 1);
    for (std::size_t k = 1; k < f.size(); ++k) v.push_back(parse_double(f[k], where));
    if (out.empty()) dim = v.size();
    if (v.size() != dim) {
      throw ParseError(where + ": vector has " + std::to_string(v.size()) + " values, expected " + std::to_string(dim));
    }
    if (!out.emplace(std::string(f[0]), std::move(v)).second) {
      throw ParseError(where + ": duplicate protein id '" + std::string(f[0]) + "'");
    }
  }
  return out;
}

Embeddings read_embeddings(const std::filesystem::path& path) { return load_embeddings(read_file(path)); }

void write_embeddings(std::ostream& out, const Embeddings& e) {
  for (const auto& [id, v] : e) {
    out << id;
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  }
}

TermVectors embed_go_vectors(const Embeddings& e, const std::vector<std::string>& classes,
                             const std::vector<std::vector<std::string>>& members) {
  TermVectors out;
  std::size_t dim = e.empty() ? 0 : e.begin()->second.size();
  for (const auto& [id, v] : e) {
    if (v.size() != dim) throw ValidationError("embedding of '" + id + "' has a different dimension");
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<double> sum(dim, 0.0);
    bool complete = !members[c].empty();
    for (const auto& p : members[c]) {
      const auto it = e.find(p);
      if (it == e.end()) {
        out.missing.emplace_back(classes[c], p);
        complete = false;
        continue;
      }
      for (std::size_t k = 0; k < dim; ++k) sum[k] += it->second[k];
    }
    if (!complete) continue;
    for (double& x : sum) x /= static_cast<double>(members[c].size());
    out.terms.push_back(classes[c]);
    out.vectors.push_back(std::move(sum));
  }
  return out;
}

TermVectors embed_go_vectors(const Embeddings& e, const AspectData& data) {
  std::vector<std::vector<std::string>> members;
  for (const auto& m : data.classes.members) {
    auto& names = members.emplace_back();
    for (auto d : m) names.push_back(data.dtm.docs[d]);
  }
  return embed_go_vectors(e, data.classes.classes, members);
}

TermVectors model_vectors(const CTfIdfModel& model) {
  TermVectors out;
  out.terms = model.classes;
  for (const auto& row : model.vectors) {
    auto& dense = out.vectors.emplace_back(model.terms.size(), 0.0);
    for (const auto& [t, x] : row) dense[t] = x;
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

bool is_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0; });
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("spearman: inputs differ in length");
  if (x.size() < 2) throw ValidationError("spearman: need at least two values");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1) / 2;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0 || syy == 0) throw ValidationError("spearman: one input is constant");
  return sxy / std::sqrt(sxx * syy);
}

CorrelationResult similarity_correlation(const TermVectors& a, const TermVectors& b) {
  std::map<std::string, std::size_t> b_index;
  for (std::size_t i = 0; i < b.terms.size(); ++i) b_index.emplace(b.terms[i], i);
  if (a.terms.size() != b.terms.size()) throw ValidationError("vector sets cover different GO terms");
  CorrelationResult out;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (index in a, index in b)
  for (std::size_t i = 0; i < a.terms.size(); ++i) {
    const auto it = b_index.find(a.terms[i]);
    if (it == b_index.end()) throw ValidationError("GO term '" + a.terms[i] + "' is missing from the second set");
    if (is_zero(a.vectors[i]) || is_zero(b.vectors[it->second])) {
      out.excluded.push_back(a.terms[i]);
      continue;
    }
    pairs.emplace_back(i, it->second);
  }
  if (pairs.size() < 3) throw ValidationError("need at least 3 GO terms with non-zero vectors");
  std::vector<double> sa, sb;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      sa.push_back(cosine(a.vectors[pairs[i].first], a.vectors[pairs[j].first]));
      sb.push_back(cosine(b.vectors[pairs[i].second], b.vectors[pairs[j].second]));
    }
  }
  out.rho = spearman(sa, sb);
  out.terms_used = pairs.size();
  return out;
}

}  // namespace puma
