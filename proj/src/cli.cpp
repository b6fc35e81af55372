#include "puma/cli.hpp"

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "puma/corpus.hpp"
#include "puma/error.hpp"
#include "puma/metrics.hpp"
#include "puma/parallel.hpp"
#include "puma/segmenter.hpp"
#include "puma/text_io.hpp"
#include "puma/topic_model.hpp"
#include "puma/trainer.hpp"
#include "puma/variant_eval.hpp"
#include "puma/vocabulary.hpp"

namespace puma {

namespace fs = std::filesystem;

namespace {

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

Fraction parse_cutoff(const std::string& text, const char* what) {
  try {
    return Fraction::parse(text);
  } catch (const Error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

struct TopicArgs {
  std::string vocab;
  std::size_t kmer = 0;
  std::string input;
  std::string annotations;
  std::vector<std::string> aspects{"MF", "BP", "CC"};
  double lambda = 0.5;
  double alpha = 1, beta = 3, theta = 2;
  bool no_graph = false;
  std::size_t min_proteins = 100;
  std::size_t undersample_cap = 0;
  std::uint64_t seed = 0;
  int threads = 0;
};

void add_topic_options(CLI::App* sub, TopicArgs& a) {
  auto* src = sub->add_option("--vocab", a.vocab, "Vocabulary file (units as terms)");
  sub->add_option("--kmer", a.kmer, "Use non-overlapping k-mers of this length as terms instead")->excludes(src);
  sub->add_option("--input", a.input, "Protein FASTA")->required();
  sub->add_option("--annotations", a.annotations, "GO annotation TSV (protein_id, go_id, aspect)")->required();
  sub->add_option("--aspect", a.aspects, "GO aspects to model")->check(CLI::IsMember({"MF", "BP", "CC"}));
  sub->add_option("--lambda", a.lambda, "Graph smoothing weight")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--alpha", a.alpha, "Adjacency weight: hierarchical parent and child");
  sub->add_option("--beta", a.beta, "Adjacency weight: mutational siblings");
  sub->add_option("--theta", a.theta, "Adjacency weight: mutational parent and child");
  sub->add_flag("--no-graph", a.no_graph, "Skip genealogy smoothing");
  sub->add_option("--min-proteins", a.min_proteins, "Drop GO terms with fewer annotated proteins");
  sub->add_option("--undersample-cap", a.undersample_cap, "Undersample larger GO terms to this many proteins (0 = off)");
  sub->add_option("--seed", a.seed, "Seed for undersampling");
  sub->add_option("--threads", a.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
}

struct TopicRun {
  std::string method;
  std::optional<Vocabulary> vocab;
  TermEncoding encoding;
};

TopicRun prepare_topic(const TopicArgs& a) {
  if (a.vocab.empty() && a.kmer == 0) throw ValidationError("one of --vocab or --kmer is required");
  TopicRun run;
  const Corpus corpus = read_fasta(a.input);
  if (a.kmer > 0) {
    run.encoding = kmer_encoding(corpus, a.kmer);
    run.method = "kmer-" + std::to_string(a.kmer);
  } else {
    run.vocab = Vocabulary::load(a.vocab);
    run.encoding = unit_encoding(*run.vocab, corpus, resolve_threads(a.threads));
    run.method = run.vocab->meta().label();
  }
  return run;
}

// Document-term matrix for one aspect; nullopt (with a warning) when no GO
// term passes the filters.
std::optional<AspectData> aspect_matrix(const TopicArgs& a, const TopicRun& run,
                                        const std::vector<GoAnnotation>& annotations, GoAspect aspect,
                                        std::ostream* err) {
  DocTermParams params{aspect, a.min_proteins, a.undersample_cap, a.seed};
  try {
    return build_doc_term(run.encoding, annotations, params);
  } catch (const ValidationError& e) {
    if (err) *err << "warning: " << to_string(aspect) << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

bool uses_graph(const TopicArgs& a, const TopicRun& run) { return run.vocab && !a.no_graph; }

DocTermMatrix smoothed(const TopicArgs& a, const TopicRun& run, const DocTermMatrix& dtm) {
  AdjacencyWeights w;
  w.alpha = a.alpha;
  w.beta = a.beta;
  w.theta = a.theta;
  return smooth(dtm, build_adjacency(*run.vocab, w), a.lambda);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mutation-aware protein unit tokenizer"};
  app.name("puma");
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  std::function<void()> action;

  // train
  struct {
    std::string input, matrix = "BLOSUM62", a = "0.7", f = "0.05", output, rejects;
    std::size_t vocab_size = 3200, max_length = kDefaultMaxLength;
    int min_len = 3, max_len = 12, threads = 0;
    bool no_mutations = false, standard_only = false, progress = false;
  } tr;
  auto* train = app.add_subcommand("train", "Learn a vocabulary from a FASTA corpus");
  train->add_option("--input", tr.input, "Protein FASTA")->required();
  train->add_option("--matrix", tr.matrix, "Substitution matrix: bundled name or file path");
  train->add_option("-a,--align-cutoff", tr.a, "Similarity cut-off a in (0, 1]");
  train->add_option("-f,--freq-cutoff", tr.f, "Frequency cut-off f in [0, 1]");
  train->add_option("-V,--vocab-size", tr.vocab_size, "Target vocabulary size");
  train->add_option("-o,--output", tr.output, "Vocabulary file to write")->required();
  train->add_flag("--no-mutations", tr.no_mutations, "Disable mutation expansion (plain pair merging)");
  train->add_option("--min-mut-len", tr.min_len, "Shortest unit that spawns mutations");
  train->add_option("--max-mut-len", tr.max_len, "Longest unit that spawns mutations");
  train->add_flag("--standard-targets-only", tr.standard_only, "Substitute only into the 20 standard residues");
  train->add_option("--max-length", tr.max_length, "Drop sequences longer than this");
  train->add_option("--rejects", tr.rejects, "TSV of sequences dropped by the corpus filters");
  train->add_option("--threads", tr.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
  train->add_flag("--progress", tr.progress, "Print the vocabulary size to stderr while training");
  train->callback([&] {
    action = [&] {
      const SubstitutionMatrix matrix = SubstitutionMatrix::resolve(tr.matrix);
      TrainerConfig cfg;
      cfg.vocab_size = tr.vocab_size;
      cfg.matrix = &matrix;
      cfg.align_cutoff = parse_cutoff(tr.a, "-a");
      cfg.freq_cutoff = parse_cutoff(tr.f, "-f");
      cfg.min_mut_len = tr.min_len;
      cfg.max_mut_len = tr.max_len;
      cfg.mutations_enabled = !tr.no_mutations;
      cfg.standard_targets_only = tr.standard_only;
      cfg.threads = resolve_threads(tr.threads);
      const auto filtered = filter_corpus(read_fasta(tr.input), tr.max_length);
      if (!tr.rejects.empty()) write_file(tr.rejects, render([&](std::ostream& s) { write_rejections(s, filtered.rejected); }));
      if (!filtered.rejected.empty()) err << "filtered out " << filtered.rejected.size() << " sequences\n";
      std::function<void(std::size_t)> progress;
      if (tr.progress) {
        progress = [&err](std::size_t n) {
          if (n % 100 == 0) err << n << "\n";
        };
      }
      const Vocabulary v = puma::train(filtered.kept, cfg, progress);
      write_file(tr.output, render([&](std::ostream& s) { v.write(s); }));
      err << v.meta().label() << ": " << v.size() << " units\n";
    };
  });

  // encode
  struct {
    std::string vocab, input, output;
    int threads = 0;
  } en;
  auto* encode = app.add_subcommand("encode", "Segment sequences into vocabulary units");
  encode->add_option("--vocab", en.vocab, "Vocabulary file")->required();
  encode->add_option("--input", en.input, "Protein FASTA")->required();
  encode->add_option("-o,--output", en.output, "TSV output (default stdout)");
  encode->add_option("--threads", en.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
  encode->callback([&] {
    action = [&] {
      const auto v = Vocabulary::load(en.vocab);
      const Corpus c = read_fasta(en.input);
      const Segmenter seg(v);
      const auto encoded = seg.encode_corpus(c, resolve_threads(en.threads));
      emit(en.output, render([&](std::ostream& s) {
             s << "id\tunits\n";
             for (std::size_t i = 0; i < c.size(); ++i) {
               s << c.records[i].id << '\t';
               for (std::size_t k = 0; k < encoded[i].size(); ++k) s << (k ? " " : "") << v.str(encoded[i][k]);
               s << '\n';
             }
           }),
           out);
    };
  });

  // vocab-stats
  struct {
    std::string vocab, corpus, histogram, stats, zipf, shared_with;
    int threads = 0;
  } vs;
  auto* stats = app.add_subcommand("vocab-stats", "Family, mutation and length statistics of a vocabulary");
  stats->add_option("--vocab", vs.vocab, "Vocabulary file")->required();
  stats->add_option("--corpus", vs.corpus, "FASTA for occurrence-weighted statistics");
  stats->add_option("--histogram", vs.histogram, "Family size histogram CSV");
  stats->add_option("--stats", vs.stats, "Summary CSV (default stdout)");
  stats->add_option("--zipf", vs.zipf, "Rank-frequency CSV (needs --corpus)");
  stats->add_option("--shared-with", vs.shared_with, "Second vocabulary or unit list for the shared-usage ratio (needs --corpus)");
  stats->add_option("--threads", vs.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
  stats->callback([&] {
    action = [&] {
      const auto v = Vocabulary::load(vs.vocab);
      if (vs.corpus.empty() && (!vs.zipf.empty() || !vs.shared_with.empty())) {
        throw ValidationError("--zipf and --shared-with need --corpus");
      }
      std::optional<Corpus> corpus;
      if (!vs.corpus.empty()) corpus = read_fasta(vs.corpus);
      const int threads = resolve_threads(vs.threads);
      const auto s = vocab_stats(v, corpus ? &*corpus : nullptr, threads);
      std::optional<double> shared;
      if (corpus && (!vs.zipf.empty() || !vs.shared_with.empty())) {
        const auto occ = unit_occurrences(v, *corpus, threads);
        if (!vs.zipf.empty()) write_file(vs.zipf, render([&](std::ostream& o) { write_zipf_csv(o, zipf_table(v, occ)); }));
        if (!vs.shared_with.empty()) shared = shared_usage_ratio(v, occ, load_unit_strings(vs.shared_with));
      }
      if (!vs.histogram.empty()) {
        write_file(vs.histogram, render([&](std::ostream& o) { write_family_histogram_csv(o, s); }));
      }
      emit(vs.stats, render([&](std::ostream& o) { write_stats_csv(o, s, shared); }), out);
    };
  });

  // compare-vocabs
  struct {
    std::vector<std::string> files;
    std::string dir, output;
  } cv;
  auto* compare = app.add_subcommand("compare-vocabs", "Pairwise unit identity between vocabularies");
  compare->add_option("files", cv.files, "Vocabulary files or unit lists");
  compare->add_option("--dir", cv.dir, "Also compare every regular file in this directory");
  compare->add_option("-o,--output", cv.output, "Identity matrix CSV (default stdout)");
  compare->callback([&] {
    action = [&] {
      std::vector<std::string> paths = cv.files;
      if (!cv.dir.empty()) {
        if (!fs::is_directory(cv.dir)) throw IoError("'" + cv.dir + "' is not a directory");
        std::vector<std::string> found;
        for (const auto& e : fs::directory_iterator(cv.dir)) {
          if (e.is_regular_file()) found.push_back(e.path().string());
        }
        std::sort(found.begin(), found.end());
        paths.insert(paths.end(), found.begin(), found.end());
      }
      if (paths.empty()) throw ValidationError("no vocabularies given");
      std::vector<std::vector<std::string>> lists;
      std::vector<std::string> names;
      for (const auto& p : paths) {
        lists.push_back(load_unit_strings(p));
        names.push_back(fs::path(p).filename().string());
      }
      std::vector<std::vector<double>> m(paths.size(), std::vector<double>(paths.size()));
      for (std::size_t i = 0; i < paths.size(); ++i) {
        for (std::size_t j = 0; j < paths.size(); ++j) {
          const auto r = vocab_identity(lists[i], lists[j]);
          if (r.size_mismatch && i < j) {
            err << "warning: " << names[i] << " and " << names[j] << " differ in size; normalised by the smaller\n";
          }
          m[i][j] = r.value;
        }
      }
      emit(cv.output, render([&](std::ostream& o) { write_identity_csv(o, names, m); }), out);
    };
  });

  // random-vocab
  struct {
    std::string reference, output;
    std::uint64_t seed = 0;
  } rv;
  auto* rvocab = app.add_subcommand("random-vocab", "Random unit list matching a vocabulary's length profile");
  rvocab->add_option("--reference", rv.reference, "Vocabulary file")->required();
  rvocab->add_option("--seed", rv.seed, "Random seed");
  rvocab->add_option("-o,--output", rv.output, "Unit list, one per line (default stdout)");
  rvocab->callback([&] {
    action = [&] {
      const auto units = random_vocabulary(Vocabulary::load(rv.reference), rv.seed);
      emit(rv.output, render([&](std::ostream& o) {
             for (const auto& u : units) o << u << '\n';
           }),
           out);
    };
  });

  // eval-siblings
  struct {
    std::string vocab, variants, fasta, rejects, details, output;
    int threads = 0;
  } es;
  auto* evals = app.add_subcommand("eval-siblings", "SAME-sibling rate of labelled variants");
  evals->add_option("--vocab", es.vocab, "Vocabulary file")->required();
  evals->add_option("--variants", es.variants, "Variant TSV (seq_id, pos, ref, alt, label)")->required();
  evals->add_option("--fasta", es.fasta, "Sequences referenced by the variants")->required();
  evals->add_option("--rejects", es.rejects, "TSV of rejected variant rows");
  evals->add_option("--details", es.details, "Per-variant TSV");
  evals->add_option("-o,--output", es.output, "Per-label rate CSV (default stdout)");
  evals->add_option("--threads", es.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
  evals->callback([&] {
    action = [&] {
      const auto v = Vocabulary::load(es.vocab);
      const auto set = read_variants(es.variants, es.fasta);
      if (!es.rejects.empty()) {
        write_file(es.rejects, render([&](std::ostream& o) { write_variant_rejections(o, set.rejected); }));
      }
      err << set.records.size() << " variants, " << set.rejected.size() << " rejected, " << set.duplicates
          << " duplicates dropped\n";
      const auto report = same_sibling_rate(v, set.records, resolve_threads(es.threads));
      if (!es.details.empty()) write_file(es.details, render([&](std::ostream& o) { write_outcomes_tsv(o, v, report); }));
      emit(es.output, render([&](std::ostream& o) { write_rate_table_csv(o, report); }), out);
    };
  });

  // random-variants
  struct {
    std::string input, output;
    std::size_t n = 1000;
    std::uint64_t seed = 0;
  } rvar;
  auto* rvars = app.add_subcommand("random-variants", "Uniformly drawn single-residue substitutions");
  rvars->add_option("--input", rvar.input, "Protein FASTA")->required();
  rvars->add_option("-n,--count", rvar.n, "Number of variants");
  rvars->add_option("--seed", rvar.seed, "Random seed");
  rvars->add_option("-o,--output", rvar.output, "Variant TSV (default stdout)");
  rvars->callback([&] {
    action = [&] {
      const auto recs = random_variants(read_fasta(rvar.input), rvar.n, rvar.seed);
      emit(rvar.output, render([&](std::ostream& o) { write_variants(o, recs); }), out);
    };
  });

  // gen-queries
  struct {
    std::string vocab, input, output, skipped;
    std::uint64_t seed = 0;
    bool no_vocab = false, no_order = false;
    int threads = 0;
  } gq;
  auto* genq = app.add_subcommand("gen-queries", "Masked-residue queries comparing siblings with alternatives");
  genq->add_option("--vocab", gq.vocab, "Vocabulary file")->required();
  genq->add_option("--input", gq.input, "Protein FASTA")->required();
  genq->add_option("--seed", gq.seed, "Seed for the random comparison residue");
  genq->add_option("-o,--output", gq.output, "Query JSONL (default stdout)");
  genq->add_option("--skipped", gq.skipped, "TSV of occurrences without a query");
  genq->add_flag("--no-vocab-constraint", gq.no_vocab, "Alternatives need not be vocabulary units");
  genq->add_flag("--no-order-constraint", gq.no_order, "Alternatives need not be inserted after the sibling");
  genq->add_option("--threads", gq.threads, "Worker threads (0 = $PUMA_THREADS or 1)");
  genq->callback([&] {
    action = [&] {
      const auto v = Vocabulary::load(gq.vocab);
      QueryOptions opts;
      opts.vocab_constraint = !gq.no_vocab;
      opts.order_constraint = !gq.no_order;
      opts.seed = gq.seed;
      opts.threads = resolve_threads(gq.threads);
      const auto qs = gen_plm_queries(v, read_fasta(gq.input), opts);
      if (!gq.skipped.empty()) write_file(gq.skipped, render([&](std::ostream& o) { write_skipped_tsv(o, qs.skipped); }));
      err << qs.queries.size() << " queries, " << qs.skipped.size() << " skipped\n";
      emit(gq.output, render([&](std::ostream& o) { write_queries(o, qs.queries); }), out);
    };
  });

  // win-rate
  struct {
    std::string queries, logits, output, per_query;
  } wr;
  auto* winr = app.add_subcommand("win-rate", "Sibling-versus-alternative win rate from masked logits");
  winr->add_option("--queries", wr.queries, "Query JSONL")->required();
  winr->add_option("--logits", wr.logits, "Logit JSONL")->required();
  winr->add_option("-o,--output", wr.output, "Summary CSV (default stdout)");
  winr->add_option("--per-query", wr.per_query, "Per-query TSV");
  winr->callback([&] {
    action = [&] {
      const auto report = compute_win_rate(read_queries(read_file(wr.queries)), read_logits(read_file(wr.logits)));
      if (!wr.per_query.empty()) write_file(wr.per_query, render([&](std::ostream& o) { write_win_table_tsv(o, report); }));
      emit(wr.output, render([&](std::ostream& o) {
             o << "comparison,queries,rate\n";
             auto row = [&](const char* name, const PairwiseRate& r) {
               o << name << ',' << r.n << ',' << format_double(r.rate) << '\n';
             };
             row("sibling_vs_alternative", report.sibling_vs_alternative);
             if (report.mutation_vs_original) row("mutation_vs_original", *report.mutation_vs_original);
             if (report.mutation_vs_random) row("mutation_vs_random", *report.mutation_vs_random);
           }),
           out);
    };
  });

  // topic-model
  TopicArgs tm;
  std::string tm_output;
  double top_fraction = 0.01;
  auto* topic = app.add_subcommand("topic-model", "Top units per GO term by genealogy-smoothed c-TF-IDF");
  add_topic_options(topic, tm);
  topic->add_option("--top-fraction", top_fraction, "Fraction of terms reported per GO term")->check(CLI::Range(0.0, 1.0));
  topic->add_option("-o,--output", tm_output, "Top-unit CSV (default stdout)");
  topic->callback([&] {
    action = [&] {
      const auto run = prepare_topic(tm);
      const auto annotations = read_go_annotations(tm.annotations);
      std::ostringstream s;
      s << "aspect,go_id,rank,unit,value\n";
      bool any = false;
      for (const auto& name : tm.aspects) {
        const GoAspect aspect = parse_aspect(name);
        const auto data = aspect_matrix(tm, run, annotations, aspect, &err);
        if (!data) continue;
        any = true;
        const auto model = ctfidf(uses_graph(tm, run) ? smoothed(tm, run, data->dtm) : data->dtm, data->classes);
        for (const auto& c : model.empty_classes) err << "warning: " << c << " has no unit counts\n";
        for (const auto& r : top_units(model, top_fraction)) {
          s << name << ',' << r.go_id << ',' << r.rank << ',' << r.term << ',' << format_double(r.value) << '\n';
        }
      }
      if (!any) throw ValidationError("no GO term passed the filters in any requested aspect");
      emit(tm_output, s.str(), out);
    };
  });

  // go-eval
  TopicArgs ge;
  std::string ge_embeddings, ge_output;
  std::optional<std::uint64_t> shuffle_seed;
  auto* goeval = app.add_subcommand("go-eval", "Spearman correlation between c-TF-IDF and embedding GO similarities");
  add_topic_options(goeval, ge);
  goeval->add_option("--embeddings", ge_embeddings, "Per-protein embedding file")->required();
  goeval->add_option("--shuffle-seed", shuffle_seed, "Shuffle protein-GO pairings on the c-TF-IDF side (null control)");
  goeval->add_option("-o,--output", ge_output, "Correlation CSV (default stdout)");
  goeval->callback([&] {
    action = [&] {
      const auto run = prepare_topic(ge);
      const auto annotations = read_go_annotations(ge.annotations);
      const auto topic_annotations = shuffle_seed ? shuffle_annotations(annotations, *shuffle_seed) : annotations;
      const auto emb = read_embeddings(ge_embeddings);
      std::ostringstream s;
      s << "aspect,method,model,terms,rho\n";
      bool any = false;
      for (const auto& name : ge.aspects) {
        const GoAspect aspect = parse_aspect(name);
        const auto data = aspect_matrix(ge, run, topic_annotations, aspect, &err);
        if (!data) continue;
        // embedding vectors always follow the true annotations
        const auto truth = shuffle_seed ? aspect_matrix(ge, run, annotations, aspect, nullptr) : data;
        if (!truth) continue;
        const auto emb_vecs = embed_go_vectors(emb, *truth);
        if (!emb_vecs.missing.empty()) {
          err << "warning: " << emb_vecs.missing.size() << " annotated proteins lack embeddings\n";
        }
        std::vector<std::pair<std::string, DocTermMatrix>> models{{"standard", data->dtm}};
        if (uses_graph(ge, run)) models.emplace_back("graph", smoothed(ge, run, data->dtm));
        for (const auto& [model_name, dtm] : models) {
          const auto model_vecs = model_vectors(ctfidf(dtm, data->classes));
          // correlate over the GO terms both sides kept
          TermVectors a, b;
          std::map<std::string, std::size_t> in_emb;
          for (std::size_t i = 0; i < emb_vecs.terms.size(); ++i) in_emb.emplace(emb_vecs.terms[i], i);
          for (std::size_t i = 0; i < model_vecs.terms.size(); ++i) {
            const auto it = in_emb.find(model_vecs.terms[i]);
            if (it == in_emb.end()) continue;
            a.terms.push_back(model_vecs.terms[i]);
            a.vectors.push_back(model_vecs.vectors[i]);
            b.terms.push_back(emb_vecs.terms[it->second]);
            b.vectors.push_back(emb_vecs.vectors[it->second]);
          }
          const auto r = similarity_correlation(a, b);
          for (const auto& t : r.excluded) err << "warning: " << t << " has a zero vector\n";
          any = true;
          s << name << ',' << csv_field(run.method) << ',' << model_name << ',' << r.terms_used << ','
            << format_double(r.rho) << '\n';
        }
      }
      if (!any) throw ValidationError("no GO term passed the filters in any requested aspect");
      emit(ge_output, s.str(), out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (action) action();
    return 0;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace puma
