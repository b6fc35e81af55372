#include "puma/vocabulary.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "puma/error.hpp"

namespace puma {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatName = "puma-vocab";
constexpr int kFormatVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json pair_json(const std::optional<UnitPair>& p) {
  if (!p) return nullptr;
  return ordered_json::array({p->left, p->right});
}

std::optional<UnitPair> pair_from(const ordered_json& j, const std::string& where) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw ValidationError(where + ": expected null or a pair of unit ids");
  }
  return UnitPair{j[0].get<UnitId>(), j[1].get<UnitId>()};
}

std::string unit_where(UnitId id) { return "unit " + std::to_string(id); }

}  // namespace

std::string VocabMeta::label() const {
  if (!mutations_enabled) return "BPE";
  return "PUMA(" + matrix + ", " + align_cutoff.str() + ", " + freq_cutoff.str() + ")";
}

Vocabulary Vocabulary::from_characters(std::string_view chars) {
  std::string sorted(chars);
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Vocabulary v;
  for (char c : sorted) v.add_character(c);
  return v;
}

UnitId Vocabulary::push(UnitRecord rec) {
  if (by_string_.count(rec.string)) {
    throw ValidationError("unit string '" + rec.string + "' is already in the vocabulary");
  }
  rec.id = static_cast<UnitId>(units_.size());
  rec.insertion_index = rec.id;
  by_string_.emplace(rec.string, rec.id);
  children_.emplace_back();
  if (rec.mut_parent) children_.at(*rec.mut_parent).push_back(rec.id);
  units_.push_back(std::move(rec));
  return units_.back().id;
}

UnitId Vocabulary::add_character(char c) {
  UnitRecord rec;
  rec.string = std::string(1, c);
  return push(std::move(rec));
}

UnitId Vocabulary::add_merged(UnitPair pair, std::optional<UnitId> mut_parent) {
  UnitRecord rec;
  rec.string = str(pair.left) + str(pair.right);
  rec.hier_parents = pair;
  rec.merge_rule = pair;
  if (mut_parent) {
    if (*mut_parent >= units_.size()) throw LookupError("unknown mutational parent id " + std::to_string(*mut_parent));
    rec.mut_parent = mut_parent;
  }
  const UnitId id = push(std::move(rec));
  merges_.push_back({pair, id, true});
  return id;
}

void Vocabulary::add_remerge(UnitPair pair, UnitId existing) {
  if (str(pair.left) + str(pair.right) != str(existing)) {
    throw ValidationError("remerge of " + std::to_string(pair.left) + "," + std::to_string(pair.right) +
                          " does not spell " + unit_where(existing));
  }
  merges_.push_back({pair, existing, false});
}

const UnitRecord& Vocabulary::unit(UnitId id) const {
  if (id >= units_.size()) throw LookupError("unknown unit id " + std::to_string(id));
  return units_[id];
}

std::optional<UnitId> Vocabulary::find(std::string_view s) const {
  auto it = by_string_.find(std::string(s));
  if (it == by_string_.end()) return std::nullopt;
  return it->second;
}

UnitId Vocabulary::family_root(UnitId u) const {
  const auto& rec = unit(u);
  return rec.mut_parent ? *rec.mut_parent : u;
}

const std::vector<UnitId>& Vocabulary::children(UnitId u) const {
  unit(u);
  return children_[u];
}

std::vector<UnitId> Vocabulary::family_of(UnitId u) const {
  const UnitId root = family_root(u);
  std::vector<UnitId> out{root};
  out.insert(out.end(), children_[root].begin(), children_[root].end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Vocabulary::family_size(UnitId u) const { return 1 + children_[family_root(u)].size(); }

void Vocabulary::validate() const {
  std::unordered_map<std::string, UnitId> seen;
  for (std::size_t i = 0; i < units_.size(); ++i) {
    const auto& u = units_[i];
    const std::string where = unit_where(u.id);
    if (u.id != i) throw ValidationError(where + ": ids must be dense and ordered (found at position " + std::to_string(i) + ")");
    if (u.insertion_index != i) throw ValidationError(where + ": insertion_index must increase strictly with id");
    if (u.string.empty()) throw ValidationError(where + ": empty unit string");
    if (!seen.emplace(u.string, u.id).second) {
      throw ValidationError(where + ": duplicate string '" + u.string + "' (also unit " + std::to_string(seen[u.string]) + ")");
    }
    auto check_pair = [&](const std::optional<UnitPair>& p, const char* field) {
      if (!p) return;
      if (p->left >= u.id || p->right >= u.id) {
        throw ValidationError(where + ": " + field + " must reference earlier units");
      }
      if (units_[p->left].string + units_[p->right].string != u.string) {
        throw ValidationError(where + ": " + field + " do not concatenate to '" + u.string + "'");
      }
    };
    check_pair(u.hier_parents, "hier_parents");
    check_pair(u.merge_rule, "merge_rule");
    if (u.string.size() == 1 && (u.hier_parents || u.merge_rule)) {
      throw ValidationError(where + ": single characters have no parents");
    }
    if (u.string.size() > 1 && !u.merge_rule) throw ValidationError(where + ": merged unit without merge_rule");
    if (u.mut_parent) {
      if (*u.mut_parent >= u.insertion_index) {
        throw ValidationError(where + ": mut_parent " + std::to_string(*u.mut_parent) + " is not inserted earlier");
      }
      if (units_[*u.mut_parent].mut_parent) {
        throw ValidationError(where + ": mut_parent " + std::to_string(*u.mut_parent) + " is itself a mutational child");
      }
      if (units_[*u.mut_parent].string.size() != u.string.size()) {
        throw ValidationError(where + ": mutational child length differs from its parent");
      }
    }
  }
  for (const auto& step : merges_) {
    if (step.result >= units_.size() || step.pair.left >= units_.size() || step.pair.right >= units_.size()) {
      throw ValidationError("merge step references an unknown unit");
    }
  }
}

void Vocabulary::write(std::ostream& out) const {
  ordered_json meta;
  meta["format"] = kFormatName;
  meta["version"] = kFormatVersion;
  meta["label"] = meta_.label();
  meta["matrix"] = meta_.matrix;
  meta["align_cutoff"] = meta_.align_cutoff.str();
  meta["freq_cutoff"] = meta_.freq_cutoff.str();
  meta["vocab_size"] = meta_.vocab_size;
  meta["corpus_fingerprint"] = hex64(meta_.corpus_fingerprint);
  meta["mutations_enabled"] = meta_.mutations_enabled;
  meta["min_mut_len"] = meta_.min_mut_len;
  meta["max_mut_len"] = meta_.max_mut_len;
  meta["units"] = units_.size();
  out << meta.dump() << '\n';

  auto emit_unit = [&out](const UnitRecord& u) {
    ordered_json j;
    j["id"] = u.id;
    j["string"] = u.string;
    j["insertion_index"] = u.insertion_index;
    j["hier_parents"] = pair_json(u.hier_parents);
    j["mut_parent"] = u.mut_parent ? ordered_json(*u.mut_parent) : ordered_json(nullptr);
    j["merge_rule"] = pair_json(u.merge_rule);
    out << j.dump() << '\n';
  };

  std::size_t next_unit = 0;
  for (const auto& step : merges_) {
    if (step.creates_unit) {
      // characters and any units inserted before this step come first
      while (next_unit <= step.result) {
        emit_unit(units_[next_unit++]);
      }
    } else {
      ordered_json j;
      j["remerge"] = ordered_json::array({step.pair.left, step.pair.right});
      j["result"] = step.result;
      out << j.dump() << '\n';
    }
  }
  while (next_unit < units_.size()) {
    emit_unit(units_[next_unit++]);
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto parse_line = [&](const std::string& text) {
    try {
      return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("vocabulary line " + std::to_string(line_no) + ": " + e.what());
    }
  };
  if (!std::getline(in, line)) throw ParseError("vocabulary file is empty");
  ++line_no;
  const auto meta = parse_line(line);
  if (!meta.is_object() || meta.value("format", "") != kFormatName) {
    throw ParseError("vocabulary line 1: missing '" + std::string(kFormatName) + "' header");
  }
  if (meta.value("version", 0) != kFormatVersion) throw ParseError("unsupported vocabulary format version");

  Vocabulary v;
  try {
    v.meta_.matrix = meta.at("matrix").get<std::string>();
    v.meta_.align_cutoff = Fraction::parse(meta.at("align_cutoff").get<std::string>());
    v.meta_.freq_cutoff = Fraction::parse(meta.at("freq_cutoff").get<std::string>());
    v.meta_.vocab_size = meta.at("vocab_size").get<std::size_t>();
    v.meta_.corpus_fingerprint = std::stoull(meta.at("corpus_fingerprint").get<std::string>(), nullptr, 16);
    v.meta_.mutations_enabled = meta.at("mutations_enabled").get<bool>();
    v.meta_.min_mut_len = meta.at("min_mut_len").get<int>();
    v.meta_.max_mut_len = meta.at("max_mut_len").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("vocabulary header: ") + e.what());
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = parse_line(line);
    const std::string where = "vocabulary line " + std::to_string(line_no);
    try {
      if (j.contains("remerge")) {
        const auto pair = pair_from(j.at("remerge"), where);
        const UnitId result = j.at("result").get<UnitId>();
        if (result >= v.units_.size() || pair->left >= v.units_.size() || pair->right >= v.units_.size()) {
          throw ValidationError(where + ": remerge references a unit not yet defined");
        }
        v.add_remerge(*pair, result);
        continue;
      }
      UnitRecord rec;
      rec.id = j.at("id").get<UnitId>();
      rec.string = j.at("string").get<std::string>();
      rec.insertion_index = j.at("insertion_index").get<std::uint32_t>();
      rec.hier_parents = pair_from(j.at("hier_parents"), where);
      if (!j.at("mut_parent").is_null()) rec.mut_parent = j.at("mut_parent").get<UnitId>();
      rec.merge_rule = pair_from(j.at("merge_rule"), where);

      const std::string uw = unit_where(rec.id);
      if (rec.id != v.units_.size()) throw ValidationError(uw + ": ids must be dense and sorted by insertion_index");
      if (rec.insertion_index != rec.id) throw ValidationError(uw + ": insertion_index must equal its position");
      if (v.by_string_.count(rec.string)) {
        throw ValidationError(uw + ": duplicate string '" + rec.string + "'");
      }
      if (rec.mut_parent && *rec.mut_parent >= rec.id) {
        throw ValidationError(uw + ": mut_parent " + std::to_string(*rec.mut_parent) + " points forward in insertion order");
      }
      for (const auto* p : {&rec.hier_parents, &rec.merge_rule}) {
        if (*p && ((*p)->left >= rec.id || (*p)->right >= rec.id)) {
          throw ValidationError(uw + ": parents must reference earlier units");
        }
      }
      v.by_string_.emplace(rec.string, rec.id);
      v.children_.emplace_back();
      if (rec.mut_parent) v.children_[*rec.mut_parent].push_back(rec.id);
      if (rec.merge_rule) v.merges_.push_back({*rec.merge_rule, rec.id, true});
      v.units_.push_back(std::move(rec));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  v.validate();
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file '" + path.string() + "'");
  write(out);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary file '" + path.string() + "'");
  return read(in);
}

}  // namespace puma
