#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "puma/alignment.hpp"
#include "puma/corpus.hpp"
#include "puma/error.hpp"
#include "puma/metrics.hpp"
#include "puma/segmenter.hpp"
#include "puma/topic_model.hpp"
#include "puma/trainer.hpp"
#include "puma/variant_eval.hpp"

namespace py = pybind11;
using namespace puma;

namespace {

// Python floats arrive as binary doubles; their shortest decimal spelling is
// what the user typed, so cut-offs stay exact.
Fraction to_fraction(const py::object& x) {
  if (py::isinstance<py::str>(x)) return Fraction::parse(x.cast<std::string>());
  return Fraction::from_double(x.cast<double>());
}

Corpus to_corpus(const std::vector<std::string>& seqs, const std::optional<std::vector<std::string>>& ids) {
  if (ids && ids->size() != seqs.size()) throw ValidationError("ids and sequences differ in length");
  Corpus c;
  for (std::size_t i = 0; i < seqs.size(); ++i) c.records.push_back({ids ? (*ids)[i] : "s" + std::to_string(i + 1), seqs[i]});
  return c;
}

py::dict unit_dict(const UnitRecord& u) {
  py::dict d;
  d["id"] = u.id;
  d["string"] = u.string;
  d["insertion_index"] = u.insertion_index;
  d["hier_parents"] = u.hier_parents ? py::cast(std::make_pair(u.hier_parents->left, u.hier_parents->right)) : py::none();
  d["mut_parent"] = u.mut_parent ? py::cast(*u.mut_parent) : py::none();
  return d;
}

py::dict stats_dict(const VocabStats& s) {
  py::dict d;
  d["family_size_histogram"] = s.family_size_histogram;
  d["family_count"] = s.family_count;
  d["singleton_count"] = s.singleton_count;
  d["family_coverage"] = s.family_coverage;
  d["mutated_ratio_vocab"] = s.mutated_ratio_vocab;
  d["unit_length_mean"] = s.unit_length_mean;
  d["unit_length_var"] = s.unit_length_var;
  d["mutated_ratio_observed"] = s.mutated_ratio_observed;
  d["observed_length_mean"] = s.observed_length_mean;
  d["observed_length_var"] = s.observed_length_var;
  d["observed_occurrences"] = s.observed_occurrences;
  return d;
}

}  // namespace

PYBIND11_MODULE(_puma, m) {
  m.doc() = "Mutation-aware protein unit tokenizer";

  auto base = py::register_exception<Error>(m, "PumaError");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<LookupError>(m, "NotFoundError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::class_<SubstitutionMatrix>(m, "SubstitutionMatrix")
      .def_static("bundled", &SubstitutionMatrix::bundled, py::return_value_policy::reference, py::arg("name"))
      .def_static("bundled_names", &SubstitutionMatrix::bundled_names)
      .def_static("parse", &SubstitutionMatrix::parse, py::arg("text"), py::arg("name") = "custom")
      .def_property_readonly("name", &SubstitutionMatrix::name)
      .def_property_readonly("symbols", &SubstitutionMatrix::symbols)
      .def("score", &SubstitutionMatrix::score, py::arg("a"), py::arg("b"))
      .def("allowed_substitutions", &SubstitutionMatrix::allowed_substitutions, py::arg("a"),
           py::arg("standard_only") = false)
      .def("serialize", &SubstitutionMatrix::serialize);

  m.def("self_score", &self_score, py::arg("matrix"), py::arg("p"));
  m.def("positional_score", &positional_score, py::arg("matrix"), py::arg("p"), py::arg("q"));
  m.def("similarity", &similarity, py::arg("matrix"), py::arg("p"), py::arg("q"));
  m.def(
      "nw_align",
      [](const SubstitutionMatrix& mat, std::string_view p, std::string_view q, int gap) {
        return nw_align(AlignParams{mat, gap}, p, q);
      },
      py::arg("matrix"), py::arg("p"), py::arg("q"), py::arg("gap_penalty") = kDefaultGapPenalty);
  m.def(
      "enumerate_variants",
      [](std::string_view parent, const SubstitutionMatrix& mat, const py::object& a, bool standard_only) {
        std::vector<std::pair<std::string, int>> out;
        for (auto& v : enumerate_variants(mat, parent, to_fraction(a), standard_only)) {
          out.emplace_back(std::move(v.string), v.positional_score);
        }
        return out;
      },
      py::arg("parent"), py::arg("matrix"), py::arg("align_cutoff") = 0.7, py::arg("standard_targets_only") = false);

  m.def(
      "read_fasta",
      [](const std::string& path) {
        std::vector<std::pair<std::string, std::string>> out;
        for (auto& r : read_fasta(path).records) out.emplace_back(std::move(r.id), std::move(r.seq));
        return out;
      },
      py::arg("path"));

  py::class_<Vocabulary>(m, "Vocabulary")
      .def_static("load", &Vocabulary::load, py::arg("path"))
      .def_static(
          "from_string",
          [](const std::string& text) {
            std::istringstream in(text);
            return Vocabulary::read(in);
          },
          py::arg("text"))
      .def("save", &Vocabulary::save, py::arg("path"))
      .def("to_string",
           [](const Vocabulary& v) {
             std::ostringstream out;
             v.write(out);
             return out.str();
           })
      .def("__len__", &Vocabulary::size)
      .def("__contains__", &Vocabulary::contains)
      .def("__getitem__", &Vocabulary::str, py::arg("id"))
      .def("find", &Vocabulary::find, py::arg("string"))
      .def("unit", [](const Vocabulary& v, UnitId id) { return unit_dict(v.unit(id)); }, py::arg("id"))
      .def("strings", &unit_strings)
      .def("family_root", &Vocabulary::family_root, py::arg("id"))
      .def("family_of", &Vocabulary::family_of, py::arg("id"))
      .def("same_family", &Vocabulary::same_family, py::arg("a"), py::arg("b"))
      .def("validate", &Vocabulary::validate)
      .def_property_readonly("label", [](const Vocabulary& v) { return v.meta().label(); })
      .def("__eq__", [](const Vocabulary& a, const Vocabulary& b) { return a == b; });

  m.def(
      "train",
      [](const std::vector<std::string>& sequences, std::size_t vocab_size, const std::string& matrix,
         const py::object& align_cutoff, const py::object& freq_cutoff, bool mutations, int min_mut_len,
         int max_mut_len, bool standard_targets_only, int threads) {
        const auto corpus = to_corpus(sequences, std::nullopt);
        const SubstitutionMatrix mat = SubstitutionMatrix::resolve(matrix);
        TrainerConfig cfg;
        cfg.vocab_size = vocab_size;
        cfg.matrix = &mat;
        cfg.align_cutoff = to_fraction(align_cutoff);
        cfg.freq_cutoff = to_fraction(freq_cutoff);
        cfg.mutations_enabled = mutations;
        cfg.min_mut_len = min_mut_len;
        cfg.max_mut_len = max_mut_len;
        cfg.standard_targets_only = standard_targets_only;
        cfg.threads = threads;
        py::gil_scoped_release release;
        return train(corpus, cfg);
      },
      py::arg("sequences"), py::arg("vocab_size") = 3200, py::arg("matrix") = "BLOSUM62", py::arg("align_cutoff") = 0.7,
      py::arg("freq_cutoff") = 0.05, py::arg("mutations") = true, py::arg("min_mut_len") = 3,
      py::arg("max_mut_len") = 12, py::arg("standard_targets_only") = false, py::arg("threads") = 1);

  py::class_<Segmenter>(m, "Segmenter")
      .def(py::init<const Vocabulary&>(), py::arg("vocab"), py::keep_alive<1, 2>())
      .def("encode", &Segmenter::encode, py::arg("sequence"))
      .def(
          "encode_strings",
          [](const Segmenter& s, std::string_view seq) {
            std::vector<std::string> out;
            for (UnitId id : s.encode(seq)) out.push_back(s.vocab().str(id));
            return out;
          },
          py::arg("sequence"))
      .def("decode", [](const Segmenter& s, const std::vector<UnitId>& ids) { return s.decode(ids); }, py::arg("ids"))
      .def(
          "unit_at",
          [](const Segmenter& s, std::string_view seq, std::size_t pos) {
            const auto span = s.unit_at(seq, pos);
            return py::make_tuple(span.unit, span.begin, span.end);
          },
          py::arg("sequence"), py::arg("pos"));

  m.def(
      "vocab_stats",
      [](const Vocabulary& v, const std::optional<std::vector<std::string>>& sequences) {
        if (!sequences) return stats_dict(vocab_stats(v));
        const auto corpus = to_corpus(*sequences, std::nullopt);
        return stats_dict(vocab_stats(v, &corpus));
      },
      py::arg("vocab"), py::arg("sequences") = py::none());
  m.def(
      "vocab_identity",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) { return vocab_identity(a, b).value; },
      py::arg("a"), py::arg("b"));
  m.def("random_vocabulary", &random_vocabulary, py::arg("reference"), py::arg("seed") = 0);

  m.def(
      "same_sibling_rate",
      [](const Vocabulary& v, const std::vector<std::tuple<std::string, std::size_t, std::string>>& variants) {
        // (sequence, 1-based position, alternative residue) per record, label "all"
        std::vector<VariantRecord> records;
        for (const auto& [seq, pos, alt] : variants) {
          if (pos < 1 || pos > seq.size() || alt.size() != 1) throw ValidationError("invalid variant");
          records.push_back({"s" + std::to_string(records.size() + 1), seq, pos, seq[pos - 1], alt[0], "all"});
        }
        const auto report = same_sibling_rate(v, records);
        return report.by_label.empty() ? 0.0 : report.by_label.front().rate;
      },
      py::arg("vocab"), py::arg("variants"));

  m.def(
      "win_rate",
      [](const std::string& queries_jsonl, const std::string& logits_jsonl) {
        const auto r = compute_win_rate(read_queries(queries_jsonl), read_logits(logits_jsonl));
        py::dict d;
        d["sibling_vs_alternative"] = r.sibling_vs_alternative.rate;
        d["queries"] = r.sibling_vs_alternative.n;
        d["mutation_vs_original"] =
            r.mutation_vs_original ? py::cast(r.mutation_vs_original->rate) : py::none();
        d["mutation_vs_random"] = r.mutation_vs_random ? py::cast(r.mutation_vs_random->rate) : py::none();
        return d;
      },
      py::arg("queries_jsonl"), py::arg("logits_jsonl"));

  m.def("spearman", &spearman, py::arg("x"), py::arg("y"));
}
