/*
 *   Copyright 2026 the hetesim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <random>

#include "hetesim/engine.hpp"
#include "hetesim/errors.hpp"
#include "hetesim/metapath.hpp"
#include "support/random_hin.hpp"

using namespace hetesim;

namespace {

// Bibliographic-style schema: authors, papers, subjects, venues,
// conferences.
Schema acm_schema() {
  return Schema({"A", "P", "S", "V", "C"}, {{"AP", "A", "P", false},
                                            {"PS", "P", "S", false},
                                            {"PV", "P", "V", false},
                                            {"VC", "V", "C", false}});
}

}  // namespace

TEST_CASE("type-name shorthand resolves forward and inverse relations") {
  Schema schema = acm_schema();
  auto apvc = parse_path("A-P-V-C", schema);
  CHECK(apvc.length() == 3);
  CHECK(to_string(schema, apvc) == "AP.PV.VC");

  auto apa = parse_path("A-P-A", schema);
  CHECK(to_string(schema, apa) == "AP.AP~");

  auto apspvc = parse_path("A-P-S-P-V-C", schema);
  CHECK(apspvc.length() == 5);
  CHECK(to_string(schema, apspvc) == "AP.PS.PS~.PV.VC");
}

TEST_CASE("single relation paths") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  auto p = parse_path("A-B", schema);
  CHECK(p.length() == 1);
  CHECK(p.step(0) == RelationRef::forward(0));
  auto q = parse_path("AB", schema);
  CHECK(p == q);
  auto r = parse_path("AB~", schema);
  CHECK(r.step(0) == RelationRef::inverse(0));
}

TEST_CASE("unconnected type pair is rejected") {
  Schema schema = acm_schema();
  CHECK_THROWS_AS((void)parse_path("A-C", schema), Error);
  try {
    (void)parse_path("A-C", schema);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotConcatenable);
  }
}

TEST_CASE("ambiguous type pair requires the explicit form") {
  Schema schema({"A", "B"}, {{"R1", "A", "B", false}, {"R2", "A", "B", false}});
  try {
    (void)parse_path("A-B", schema);
    FAIL("expected ambiguity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AmbiguousRelation);
  }
  CHECK(parse_path("R1.R2~.R2", schema).length() == 3);
}

TEST_CASE("self-loops between the same type are ambiguous in shorthand") {
  Schema schema({"A"}, {{"AA", "A", "A", false}});
  // Both AA and AA~ connect A to A.
  CHECK_THROWS_AS((void)parse_path("A-A", schema), Error);
  CHECK(parse_path("AA", schema).length() == 1);
}

TEST_CASE("self-relation I parses only as a complete path") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  auto p = parse_path("I(A)", schema);
  CHECK(p.length() == 1);
  CHECK(p.step(0) == RelationRef::self_loop(0));
  CHECK(is_symmetric(p));
  CHECK_THROWS_AS((void)parse_path("I(A).AB", schema), Error);
}

TEST_CASE("parse rejects junk") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  CHECK_THROWS_AS((void)parse_path("", schema), Error);
  CHECK_THROWS_AS((void)parse_path("A-", schema), Error);
  CHECK_THROWS_AS((void)parse_path("NOPE", schema), Error);
  CHECK_THROWS_AS((void)parse_path("AB..AB~", schema), Error);
}

TEST_CASE("reverse examples") {
  Schema schema = acm_schema();
  auto apvc = parse_path("A-P-V-C", schema);
  CHECK(to_string(schema, reverse(schema, apvc)) == "VC~.PV~.AP~");  // CVPA
  CHECK(reverse(schema, reverse(schema, apvc)) == apvc);

  Schema ab({"A", "B"}, {{"AB", "A", "B", false}});
  CHECK(to_string(ab, reverse(ab, parse_path("AB", ab))) == "AB~");

  auto apa = parse_path("A-P-A", schema);
  CHECK(reverse(schema, apa) == apa);
}

TEST_CASE("symmetry predicate") {
  Schema schema = acm_schema();
  Schema schema_c({"A", "P", "C"},
                  {{"AP", "A", "P", false}, {"PC", "P", "C", false}});
  auto apcpa = parse_path("A-P-C-P-A", schema_c);
  CHECK(is_symmetric(apcpa));
  CHECK_FALSE(is_symmetric(parse_path("A-P-V-C", schema)));
  CHECK(is_symmetric(parse_path("I(A)", schema)));
}

TEST_CASE("concatenate joins and validates") {
  Schema schema = acm_schema();
  auto ap = parse_path("AP", schema);
  auto pv = parse_path("PV", schema);
  auto vc = parse_path("VC", schema);
  CHECK(to_string(schema, concatenate(schema, ap, pv)) == "AP.PV");
  CHECK_THROWS_AS((void)concatenate(schema, ap, vc), Error);

  auto sym = concatenate(schema, ap, reverse(schema, ap));
  CHECK(is_symmetric(sym));
}

TEST_CASE("decompose even paths at the middle type") {
  Schema schema_c({"A", "P", "C"},
                  {{"AP", "A", "P", false}, {"PC", "P", "C", false}});
  auto apcpa = parse_path("A-P-C-P-A", schema_c);
  auto d = decompose(schema_c, apcpa);
  REQUIRE_FALSE(d.odd());
  CHECK(d.left.size() == 2);
  CHECK(d.right.size() == 2);
  CHECK(d.middle_type == schema_c.type_index("C"));
  CHECK(d.left[0] == RelationRef::forward(0));
  CHECK(d.left[1] == RelationRef::forward(1));
  // For a symmetric path the reversed right half equals the left half.
  CHECK(d.right_reversed() == d.left);
}

TEST_CASE("decompose odd paths at the middle relation") {
  Schema schema = acm_schema();
  auto apspvc = parse_path("A-P-S-P-V-C", schema);
  auto d = decompose(schema, apspvc);
  REQUIRE(d.odd());
  CHECK(d.left.size() == 2);                               // A-P-S
  CHECK(*d.middle_relation == RelationRef::inverse(1));    // S->P leg
  CHECK(d.right.size() == 2);                              // P-V-C
  CHECK(d.left_length() == 3);
  CHECK(d.right_length() == 3);
}

TEST_CASE("decompose a single atomic relation") {
  Schema schema({"A", "B"}, {{"AB", "A", "B", false}});
  auto d = decompose(schema, parse_path("AB", schema));
  REQUIRE(d.odd());
  CHECK(d.left.empty());
  CHECK(d.right.empty());
  CHECK(*d.middle_relation == RelationRef::forward(0));
  CHECK(d.left_length() == 1);
  CHECK(d.right_length() == 1);
}

TEST_CASE("decomposition halves balance for random paths") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = testsupport::random_graph(rng);
    int len = 1 + static_cast<int>(rng() % 6);
    auto p = testsupport::random_path(rng, g.schema(), len);
    auto d = decompose(g.schema(), p);
    CHECK(d.left_length() == d.right_length());
    CHECK(d.left_length() == (p.length() + 1) / 2);
    CHECK(d.odd() == (p.length() % 2 == 1));

    auto rp = reverse(g.schema(), p);
    CHECK(reverse(g.schema(), rp) == p);
    CHECK(is_symmetric(p) == (p == rp));
  }
}

TEST_CASE("canonical printing round-trips through the parser") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = testsupport::random_graph(rng);
    auto p = testsupport::random_path(rng, g.schema(), 1 + static_cast<int>(rng() % 5));
    CHECK(parse_path(to_string(g.schema(), p), g.schema()) == p);
  }
}

TEST_CASE("atomic decomposition reproduces W under the sqrt-weight convention") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    testsupport::RandomHinOptions opt;
    opt.weighted = true;
    auto g = testsupport::random_graph(rng, opt);
    for (Index r = 0; r < g.schema().relation_count(); ++r) {
      const auto& w = g.adjacency(RelationRef::forward(r));
      auto [wo, wi] = detail::decompose_relation_matrices(w);
      CHECK(wo.cols() == w.nnz());  // one edge object per relation instance
      CHECK(multiply(wo, wi).max_abs_diff(w) < 1e-12);
    }
  }
}
