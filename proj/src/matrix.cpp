#include "puma/matrix.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

#include "puma/error.hpp"
#include "puma/text_io.hpp"

namespace puma {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& bundled_matrix_texts();
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string symbol_text(char c) {
  return std::string("'") + c + "'";
}

}  // namespace

bool is_standard_residue(char c) {
  return kStandardResidues.find(c) != std::string_view::npos;
}

bool SubstitutionMatrix::has(char c) const {
  return index_[static_cast<unsigned char>(c)] >= 0;
}

int SubstitutionMatrix::score(char a, char b) const {
  if (!has(a)) throw LookupError("symbol " + symbol_text(a) + " is not in matrix " + name_);
  if (!has(b)) throw LookupError("symbol " + symbol_text(b) + " is not in matrix " + name_);
  return score_unchecked(a, b);
}

SubstitutionMatrix SubstitutionMatrix::parse(std::string_view text, std::string name) {
  SubstitutionMatrix m;
  m.name_ = std::move(name);
  std::vector<std::vector<int>> rows;
  std::vector<std::size_t> row_lines;
  std::string row_symbols;
  bool have_header = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.front().front() == '#') {
      if (!have_header) m.comments_.emplace_back(line);
      continue;
    }
    const std::string where = "line " + std::to_string(line_no);
    if (!have_header) {
      for (auto f : fields) {
        if (f.size() != 1) throw ParseError(where + ": header symbol '" + std::string(f) + "' is not a single character");
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(f.front())));
        if (m.has(c)) throw ParseError(where + ": duplicate symbol " + symbol_text(c) + " in header");
        m.index_[static_cast<unsigned char>(c)] = static_cast<std::int16_t>(m.symbols_.size());
        m.symbols_.push_back(c);
      }
      have_header = true;
      continue;
    }
    if (fields.front().size() != 1) throw ParseError(where + ": row label '" + std::string(fields.front()) + "' is not a single character");
    const char label = static_cast<char>(std::toupper(static_cast<unsigned char>(fields.front().front())));
    if (!m.has(label)) throw ParseError(where + ": row label " + symbol_text(label) + " is not in the header");
    if (row_symbols.find(label) != std::string::npos) throw ParseError(where + ": duplicate row for symbol " + symbol_text(label));
    if (fields.size() - 1 != m.symbols_.size()) {
      throw ParseError(where + ": expected " + std::to_string(m.symbols_.size()) + " cells, found " +
                       std::to_string(fields.size() - 1));
    }
    std::vector<int> row;
    row.reserve(m.symbols_.size());
    for (std::size_t k = 1; k < fields.size(); ++k) {
      int v = 0;
      auto f = fields[k];
      auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw ParseError(where + ": non-integer cell '" + std::string(f) + "'");
      }
      row.push_back(v);
    }
    row_symbols.push_back(label);
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }
  if (!have_header) throw ParseError("matrix has no header row");
  for (char c : m.symbols_) {
    if (row_symbols.find(c) == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": table ends with a missing row for symbol " + symbol_text(c));
    }
  }

  const std::size_t n = m.symbols_.size();
  m.cells_.assign(n * n, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto i = static_cast<std::size_t>(m.index_[static_cast<unsigned char>(row_symbols[r])]);
    std::copy(rows[r].begin(), rows[r].end(), m.cells_.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const char a = row_symbols[r];
    for (char b : m.symbols_) {
      if (m.score_unchecked(a, b) != m.score_unchecked(b, a)) {
        throw ParseError("line " + std::to_string(row_lines[r]) + ": asymmetric table, score(" + a + "," + b +
                         ")=" + std::to_string(m.score_unchecked(a, b)) + " but score(" + b + "," + a +
                         ")=" + std::to_string(m.score_unchecked(b, a)));
      }
    }
  }
  m.check_invariants();
  return m;
}

SubstitutionMatrix SubstitutionMatrix::from_table(std::string name, std::string symbols,
                                                  const std::vector<std::vector<int>>& table) {
  std::ostringstream text;
  for (char c : symbols) text << "  " << c;
  text << '\n';
  if (table.size() != symbols.size()) throw ParseError("table has " + std::to_string(table.size()) + " rows for " + std::to_string(symbols.size()) + " symbols");
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    text << symbols[i];
    for (int v : table[i]) text << ' ' << v;
    text << '\n';
  }
  return parse(text.str(), std::move(name));
}

void SubstitutionMatrix::check_invariants() const {
  for (char c : kStandardResidues) {
    if (has(c) && score_unchecked(c, c) <= 0) {
      throw ParseError("diagonal score for standard residue " + symbol_text(c) + " must be positive");
    }
  }
}

const SubstitutionMatrix& SubstitutionMatrix::bundled(std::string_view name) {
  static const std::vector<SubstitutionMatrix> cache = [] {
    std::vector<SubstitutionMatrix> out;
    for (const auto& [n, text] : detail::bundled_matrix_texts()) out.push_back(parse(text, std::string(n)));
    return out;
  }();
  const std::string wanted = upper(name);
  for (const auto& m : cache) {
    if (m.name() == wanted) return m;
  }
  throw LookupError("unknown bundled matrix '" + std::string(name) + "'");
}

std::vector<std::string> SubstitutionMatrix::bundled_names() {
  std::vector<std::string> out;
  for (const auto& [n, text] : detail::bundled_matrix_texts()) out.emplace_back(n);
  return out;
}

SubstitutionMatrix SubstitutionMatrix::resolve(std::string_view name_or_path) {
  const std::string wanted = upper(name_or_path);
  for (const auto& n : bundled_names()) {
    if (n == wanted) return bundled(n);
  }
  std::ifstream in{std::string(name_or_path), std::ios::binary};
  if (!in) throw IoError("cannot open matrix file '" + std::string(name_or_path) + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string stem(name_or_path);
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem.erase(0, slash + 1);
  return parse(buf.str(), stem);
}

std::vector<char> SubstitutionMatrix::allowed_substitutions(char a, bool standard_only) const {
  if (!has(a)) throw LookupError("symbol " + symbol_text(a) + " is not in matrix " + name_);
  std::vector<char> out;
  for (char b : symbols_) {
    if (b == '*') continue;
    if (b != a && standard_only && !is_standard_residue(b)) continue;
    if (score_unchecked(a, b) >= 0 || b == a) out.push_back(b);
  }
  std::stable_sort(out.begin(), out.end(), [&](char x, char y) {
    const int sx = score_unchecked(a, x);
    const int sy = score_unchecked(a, y);
    if (sx != sy) return sx > sy;
    return x < y;
  });
  return out;
}

std::string SubstitutionMatrix::serialize() const {
  int width = 2;
  for (int v : cells_) width = std::max(width, static_cast<int>(std::to_string(v).size()) + 1);
  std::ostringstream out;
  for (const auto& c : comments_) out << c << '\n';
  out << ' ';
  for (char c : symbols_) out << std::string(static_cast<std::size_t>(width - 1), ' ') << c;
  out << '\n';
  for (char a : symbols_) {
    out << a;
    for (char b : symbols_) {
      const std::string v = std::to_string(score_unchecked(a, b));
      out << std::string(static_cast<std::size_t>(width) - v.size(), ' ') << v;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace puma
