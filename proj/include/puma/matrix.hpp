#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace puma {

inline constexpr std::string_view kStandardResidues = "ACDEFGHIKLMNPQRSTVWY";

bool is_standard_residue(char c);

/// Symmetric integer log-odds table in the NCBI text layout (BLOSUM/PAM).
///
/// Immutable once constructed. Symbols keep the order of the header row.
class SubstitutionMatrix {
 public:
  /// Parses `#` comments, a header row of symbols and one labeled row per
  /// symbol. Errors name the offending line.
  static SubstitutionMatrix parse(std::string_view text, std::string name = "custom");

  /// Builds a matrix directly from a square table (row-major, symbol order).
  static SubstitutionMatrix from_table(std::string name, std::string symbols,
                                       const std::vector<std::vector<int>>& table);

  /// One of BLOSUM62, BLOSUM45, PAM70, PAM250 (case-insensitive).
  static const SubstitutionMatrix& bundled(std::string_view name);
  static std::vector<std::string> bundled_names();

  /// A bundled name, or else a path to a matrix file.
  static SubstitutionMatrix resolve(std::string_view name_or_path);

  const std::string& name() const { return name_; }
  const std::string& symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  bool has(char c) const;

  /// Throws LookupError for symbols outside the matrix.
  int score(char a, char b) const;
  int score_unchecked(char a, char b) const noexcept {
    const std::size_t n = symbols_.size();
    return cells_[static_cast<std::size_t>(index_[static_cast<unsigned char>(a)]) * n +
                  static_cast<std::size_t>(index_[static_cast<unsigned char>(b)])];
  }

  /// Residues b with score(a, b) >= 0, never `*`, ordered by descending score
  /// then alphabetically. With `standard_only` the targets are restricted to
  /// the 20 standard amino acids (a itself is always kept).
  std::vector<char> allowed_substitutions(char a, bool standard_only = false) const;

  /// NCBI-style text; parse(serialize()) reproduces the table and comments.
  std::string serialize() const;

  friend bool operator==(const SubstitutionMatrix& a, const SubstitutionMatrix& b) {
    return a.symbols_ == b.symbols_ && a.cells_ == b.cells_;
  }

 private:
  SubstitutionMatrix() { index_.fill(-1); }
  void check_invariants() const;

  std::string name_;
  std::string symbols_;
  std::array<std::int16_t, 256> index_{};
  std::vector<int> cells_;
  std::vector<std::string> comments_;
};

}  // namespace puma
