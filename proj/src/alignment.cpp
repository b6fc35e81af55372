#include "puma/alignment.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "puma/error.hpp"

namespace puma {

namespace {

void require_symbols(const SubstitutionMatrix& m, std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!m.has(s[i])) {
      throw LookupError("symbol '" + std::string(1, s[i]) + "' at position " + std::to_string(i + 1) +
                        " is not in matrix " + m.name());
    }
  }
}

}  // namespace

int self_score(const SubstitutionMatrix& m, std::string_view p) {
  require_symbols(m, p);
  int total = 0;
  for (char c : p) total += m.score_unchecked(c, c);
  return total;
}

int positional_score(const SubstitutionMatrix& m, std::string_view p, std::string_view q) {
  if (p.size() != q.size()) {
    throw ValidationError("positional score needs equal lengths, got " + std::to_string(p.size()) + " and " +
                          std::to_string(q.size()));
  }
  require_symbols(m, p);
  require_symbols(m, q);
  int total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) total += m.score_unchecked(p[i], q[i]);
  return total;
}

double similarity(const SubstitutionMatrix& m, std::string_view p, std::string_view q) {
  const int pos = positional_score(m, p, q);
  const int self = self_score(m, p);
  if (self == 0) throw ValidationError("self-score of '" + std::string(p) + "' is zero");
  return static_cast<double>(pos) / static_cast<double>(self);
}

int nw_align(const AlignParams& params, std::string_view p, std::string_view q) {
  if (params.gap_penalty > 0) throw ValidationError("gap penalty must be <= 0");
  const auto& m = params.matrix;
  require_symbols(m, p);
  require_symbols(m, q);
  const int gap = params.gap_penalty;
  // one rolling row over q
  std::vector<int> prev(q.size() + 1);
  std::vector<int> cur(q.size() + 1);
  for (std::size_t j = 0; j <= q.size(); ++j) prev[j] = static_cast<int>(j) * gap;
  for (std::size_t i = 1; i <= p.size(); ++i) {
    cur[0] = static_cast<int>(i) * gap;
    for (std::size_t j = 1; j <= q.size(); ++j) {
      const int diag = prev[j - 1] + m.score_unchecked(p[i - 1], q[j - 1]);
      cur[j] = std::max({diag, prev[j] + gap, cur[j - 1] + gap});
    }
    std::swap(prev, cur);
  }
  return prev[q.size()];
}

}  // namespace puma
