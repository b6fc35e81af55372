#include <doctest.h>

#include <cstdlib>

#include "puma/error.hpp"
#include "puma/parallel.hpp"
#include "puma/text_io.hpp"

TEST_CASE("line and field splitting") {
  const auto lines = puma::split_lines("a\r\nb\n\nc");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "a");
  CHECK(lines[2].empty());
  CHECK(lines[3] == "c");
  CHECK(puma::split("x\t\ty", '\t').size() == 3);
  CHECK(puma::split_ws("  a  b\tc ").size() == 3);
  CHECK(puma::trim("  q \n") == "q");
}

TEST_CASE("strict number parsing") {
  CHECK(puma::parse_int("42", "n") == 42);
  CHECK_THROWS_AS(puma::parse_int("4x", "n"), puma::ParseError);
  CHECK_THROWS_AS(puma::parse_int("", "n"), puma::ParseError);
  CHECK(puma::parse_double("-1.5e2", "x") == -150.0);
  CHECK(puma::format_double(0.1) == "0.1");
  CHECK(puma::parse_double(puma::format_double(1.0 / 3.0), "x") == 1.0 / 3.0);
}

TEST_CASE("thread count resolution") {
  CHECK(puma::resolve_threads(3) == 3);
  ::setenv("PUMA_THREADS", "5", 1);
  CHECK(puma::resolve_threads(0) == 5);
  ::setenv("PUMA_THREADS", "zero", 1);
  CHECK_THROWS_AS(puma::resolve_threads(0), puma::ValidationError);
  ::unsetenv("PUMA_THREADS");
  CHECK(puma::resolve_threads(0) == 1);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  for (int threads : {1, 2, 7}) {
    std::vector<int> hits(101, 0);
    puma::parallel_for(hits.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hits[i];
    });
    for (int h : hits) CHECK(h == 1);
  }
  CHECK_THROWS_AS(puma::parallel_for(10, 3, [](std::size_t b, std::size_t) {
                    if (b > 0) throw puma::ValidationError("boom");
                  }),
                  puma::ValidationError);
}

TEST_CASE("csv fields are quoted only when needed") {
  CHECK(puma::csv_field("BPE") == "BPE");
  CHECK(puma::csv_field("PUMA(BLOSUM62, 0.7, 0.05)") == "\"PUMA(BLOSUM62, 0.7, 0.05)\"");
  CHECK(puma::csv_field("a\"b,") == "\"a\"\"b,\"");
}
