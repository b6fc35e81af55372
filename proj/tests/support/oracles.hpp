#pragma once

// Deliberately simple reference implementations used to cross-check the
// library. They share no code with it beyond matrix score lookups.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "puma/matrix.hpp"

namespace oracle {

/// Quadratic pair merging over string tokens: each round recounts every
/// adjacent pair, takes the most frequent (ties: smallest left string, then
/// smallest right string), and rewrites each sequence left to right. Stops
/// when the distinct token strings seen reach `vocab_size` or no pair is left.
std::vector<std::pair<std::string, std::string>> naive_bpe(const std::vector<std::string>& seqs,
                                                           std::size_t vocab_size);

/// `a` itself plus its non-negative-score targets, excluding '*', by a full scan.
std::set<char> allowed(const puma::SubstitutionMatrix& m, char a, bool standard_only = false);

/// Every string over the per-position allowed targets whose positional score
/// reaches num/den of the parent's self score, excluding the parent itself.
std::set<std::string> brute_force_variants(const puma::SubstitutionMatrix& m, const std::string& parent,
                                           long long num, long long den, bool standard_only = false);

/// Adjacent pair counts of id rows.
std::map<std::pair<unsigned, unsigned>, long long> recount(const std::vector<std::vector<unsigned>>& rows);

/// Average ranks (1-based) and Pearson correlation of the ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oracle
