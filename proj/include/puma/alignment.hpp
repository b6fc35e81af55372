#pragma once

#include <string_view>

#include "puma/matrix.hpp"

namespace puma {

inline constexpr int kDefaultGapPenalty = -4;

struct AlignParams {
  const SubstitutionMatrix& matrix;
  int gap_penalty = kDefaultGapPenalty;  // per gap symbol, linear, <= 0
};

/// Sum of diagonal scores score(p_i, p_i).
int self_score(const SubstitutionMatrix& m, std::string_view p);

/// Gapless sum of score(p_i, q_i); p and q must have equal length.
int positional_score(const SubstitutionMatrix& m, std::string_view p, std::string_view q);

/// positional_score(p, q) / self_score(p). The denominator is always the
/// parent p. Throws on length mismatch or a zero self-score.
double similarity(const SubstitutionMatrix& m, std::string_view p, std::string_view q);

/// Needleman-Wunsch global alignment score with a linear gap penalty.
int nw_align(const AlignParams& params, std::string_view p, std::string_view q);

}  // namespace puma
