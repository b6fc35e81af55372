#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

std::vector<std::pair<std::string, std::string>> naive_bpe(const std::vector<std::string>& seqs,
                                                           std::size_t vocab_size) {
  std::vector<std::vector<std::string>> toks;
  std::set<std::string> vocab;
  for (const auto& s : seqs) {
    auto& t = toks.emplace_back();
    for (char c : s) {
      t.emplace_back(1, c);
      vocab.insert(std::string(1, c));
    }
  }
  std::vector<std::pair<std::string, std::string>> merges;
  while (vocab.size() < vocab_size) {
    std::map<std::pair<std::string, std::string>, long long> counts;
    for (const auto& t : toks) {
      for (std::size_t i = 0; i + 1 < t.size(); ++i) ++counts[{t[i], t[i + 1]}];
    }
    if (counts.empty()) break;
    // std::map iterates in (left, right) order, so the first maximum wins ties
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto pair = best->first;
    merges.push_back(pair);
    vocab.insert(pair.first + pair.second);
    for (auto& t : toks) {
      std::vector<std::string> next;
      for (std::size_t i = 0; i < t.size();) {
        if (i + 1 < t.size() && t[i] == pair.first && t[i + 1] == pair.second) {
          next.push_back(pair.first + pair.second);
          i += 2;
        } else {
          next.push_back(t[i]);
          ++i;
        }
      }
      t = std::move(next);
    }
  }
  return merges;
}

std::set<char> allowed(const puma::SubstitutionMatrix& m, char a, bool standard_only) {
  std::set<char> out;
  for (char b : m.symbols()) {
    if (b == '*') continue;
    if (b == a) {
      out.insert(b);  // keeping the parent residue is always an option
      continue;
    }
    if (standard_only && puma::kStandardResidues.find(b) == std::string_view::npos) continue;
    if (m.score(a, b) >= 0) out.insert(b);
  }
  return out;
}

std::set<std::string> brute_force_variants(const puma::SubstitutionMatrix& m, const std::string& parent,
                                           long long num, long long den, bool standard_only) {
  long long self = 0;
  for (char c : parent) self += m.score(c, c);
  std::vector<std::vector<char>> options;
  for (char c : parent) {
    const auto s = allowed(m, c, standard_only);
    options.emplace_back(s.begin(), s.end());
  }
  std::set<std::string> out;
  std::vector<std::size_t> idx(parent.size(), 0);
  while (true) {
    std::string cand;
    long long score = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) {
      cand.push_back(options[i][idx[i]]);
      score += m.score(parent[i], cand.back());
    }
    if (cand != parent && score * den >= num * self) out.insert(cand);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == options[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

std::map<std::pair<unsigned, unsigned>, long long> recount(const std::vector<std::vector<unsigned>>& rows) {
  std::map<std::pair<unsigned, unsigned>, long long> out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) ++out[{r[i], r[i + 1]}];
  }
  return out;
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  // O(n^2) counting definition: rank = 1 + #smaller + (#equal - 1) / 2
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double y : x) {
      if (y < x[i]) ++less;
      if (y == x[i]) ++equal;
    }
    r[i] = 1 + less + (equal - 1) / 2;
  }
  return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
