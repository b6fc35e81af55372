#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "puma/error.hpp"
#include "puma/matrix.hpp"

using puma::SubstitutionMatrix;

namespace {

std::set<char> as_set(const std::vector<char>& v) { return {v.begin(), v.end()}; }

const SubstitutionMatrix& blosum62() { return SubstitutionMatrix::bundled("BLOSUM62"); }

}  // namespace

TEST_CASE("bundled BLOSUM62 cells") {
  const auto& m = blosum62();
  CHECK(m.score('K', 'R') == 2);
  CHECK(m.score('Y', 'F') == 3);
  CHECK(m.score('E', 'Z') == 4);
  CHECK(m.score('H', 'H') == 8);
  CHECK(m.score('A', 'A') == 4);
  CHECK(m.score('W', 'W') == 11);
  CHECK(m.score('*', '*') == 1);
}

TEST_CASE("bundled matrices are symmetric with positive standard diagonals") {
  for (const auto& name : SubstitutionMatrix::bundled_names()) {
    const auto& m = SubstitutionMatrix::bundled(name);
    for (char a : m.symbols()) {
      for (char b : m.symbols()) CHECK(m.score(a, b) == m.score(b, a));
    }
    for (char a : puma::kStandardResidues) CHECK(m.score(a, a) > 0);
  }
  CHECK(&SubstitutionMatrix::bundled("blosum62") == &blosum62());
  CHECK_THROWS_AS(SubstitutionMatrix::bundled("BLOSUM99"), puma::LookupError);
}

TEST_CASE("unknown symbols are lookup errors") {
  CHECK_THROWS_AS(blosum62().score('J', 'A'), puma::LookupError);
  CHECK_THROWS_AS(blosum62().allowed_substitutions('O'), puma::LookupError);
}

TEST_CASE("allowed substitutions of K") {
  CHECK(as_set(blosum62().allowed_substitutions('K', true)) == std::set<char>{'K', 'R', 'Q', 'E', 'N', 'S'});
  // ambiguity codes are targets by default
  CHECK(as_set(blosum62().allowed_substitutions('K')) == std::set<char>{'K', 'R', 'Q', 'E', 'N', 'S', 'B', 'Z'});
  CHECK(as_set(blosum62().allowed_substitutions('E')).count('Z') == 1);
}

TEST_CASE("allowed substitutions ordering") {
  const auto subs = blosum62().allowed_substitutions('K');
  REQUIRE(!subs.empty());
  CHECK(subs.front() == 'K');
  for (std::size_t i = 1; i < subs.size(); ++i) {
    const int prev = blosum62().score('K', subs[i - 1]), cur = blosum62().score('K', subs[i]);
    CHECK((prev > cur || (prev == cur && subs[i - 1] < subs[i])));
  }
}

TEST_CASE("allowed substitutions match a brute-force scan") {
  for (const auto& name : SubstitutionMatrix::bundled_names()) {
    const auto& m = SubstitutionMatrix::bundled(name);
    for (char a : m.symbols()) {
      if (a == '*') continue;
      for (bool standard : {false, true}) {
        const auto got = as_set(m.allowed_substitutions(a, standard));
        CHECK(got == oracle::allowed(m, a, standard));
        CHECK(got.count(a) == 1);
        CHECK(got.count('*') == 0);
      }
    }
  }
}

TEST_CASE("parse a single-cell table") {
  const auto m = SubstitutionMatrix::parse("# one residue\n   A\nA  4\n", "tiny");
  CHECK(m.size() == 1);
  CHECK(m.score('A', 'A') == 4);
  CHECK(m.name() == "tiny");
}

TEST_CASE("parse errors name the line") {
  auto message = [](std::string_view text) {
    try {
      SubstitutionMatrix::parse(text);
    } catch (const puma::ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("  A R\nA 4 -1\nR -2 5\n").find("asymmetric") != std::string::npos);
  CHECK(message("  A A\nA 4 4\n").find("duplicate") != std::string::npos);
  CHECK(message("  A R\nA 4 x\nR -1 5\n").find("line 2") != std::string::npos);
  CHECK(message("  A R\nA 4 -1\n").find("missing") != std::string::npos);
  CHECK(message("  A R\nA 4 -1 0\nR -1 5\n").find("line 2") != std::string::npos);
  CHECK_THROWS_AS(SubstitutionMatrix::parse("  A\nA 0\n"), puma::ParseError);  // non-positive diagonal
}

TEST_CASE("serialize round trip") {
  for (const auto& name : SubstitutionMatrix::bundled_names()) {
    const auto& m = SubstitutionMatrix::bundled(name);
    const auto again = SubstitutionMatrix::parse(m.serialize(), name);
    CHECK(again == m);
    CHECK(again.serialize() == m.serialize());
  }
}

TEST_CASE("from_table builds the same matrix as parsing") {
  const auto m = SubstitutionMatrix::from_table("t", "AR", {{4, -1}, {-1, 5}});
  CHECK(m == SubstitutionMatrix::parse("  A R\nA 4 -1\nR -1 5\n"));
  CHECK_THROWS_AS(SubstitutionMatrix::from_table("t", "AR", {{4, -1}, {0, 5}}), puma::Error);
}
