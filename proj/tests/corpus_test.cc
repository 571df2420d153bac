// Copyright 2026 The readv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "readv/corpus.h"

#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "readv/errors.h"
#include "readv/io.h"
#include "test_util.h"

namespace readv {
namespace {

using testing::make_example;

constexpr const char* kThreeRecords = R"json([
  {"id": "a1", "docid": "D1", "relation": "per:title",
   "token": ["John", "Smith", "is", "a", "lawyer"],
   "subj_start": 0, "subj_end": 1, "obj_start": 4, "obj_end": 4,
   "subj_type": "PERSON", "obj_type": "TITLE",
   "stanford_pos": ["NNP", "NNP", "VBZ", "DT", "NN"]},
  {"id": "a2", "relation": "no_relation",
   "token": ["Acme", "hired", "Bob"],
   "subj_start": 0, "subj_end": 0, "obj_start": 2, "obj_end": 2,
   "subj_type": "ORGANIZATION", "obj_type": "PERSON"},
  {"id": "a3", "relation": "org:city_of_headquarters",
   "token": ["Acme", ",", "based", "in", "Paris"],
   "subj_start": 0, "subj_end": 0, "obj_start": 4, "obj_end": 4,
   "subj_type": "ORGANIZATION", "obj_type": "CITY"}
])json";

std::string one_record(int subj_start, int subj_end, int obj_start,
                       int obj_end, const std::string& id = "bad") {
  return R"([{"id": ")" + id + R"(", "relation": "no_relation",
      "token": ["a", "b", "c"], "subj_start": )" +
         std::to_string(subj_start) + ", \"subj_end\": " +
         std::to_string(subj_end) + ", \"obj_start\": " +
         std::to_string(obj_start) + ", \"obj_end\": " +
         std::to_string(obj_end) +
         R"(, "subj_type": "PERSON", "obj_type": "CITY"}])";
}

TEST_CASE("well-formed file loads every record in order") {
  const Corpus c = parse_corpus(kThreeRecords);
  REQUIRE(c.size() == 3);
  CHECK(c.examples()[0].id == "a1");
  CHECK(c.examples()[2].id == "a3");
  CHECK(c.examples()[0].subj_surface() == Tokens{"John", "Smith"});
  CHECK(c.examples()[0].obj_span == Span{4, 4});
  CHECK(c.examples()[0].extra["docid"] == "D1");
  CHECK(c.type_set().contains("TITLE"));
  CHECK_FALSE(c.examples()[0].subj_link.has_value());
  CHECK(c.find("a2") == &c.examples()[1]);
  CHECK(c.find("zz") == nullptr);
}

TEST_CASE("span violations are rejected naming the example") {
  SUBCASE("end past the last token") {
    try {
      parse_corpus(one_record(0, 3, 2, 2));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.example_id() == "bad");
    }
  }
  SUBCASE("start after end") {
    CHECK_THROWS_AS(parse_corpus(one_record(1, 0, 2, 2)), ValidationError);
  }
  SUBCASE("negative start") {
    CHECK_THROWS_AS(parse_corpus(one_record(-1, 0, 2, 2)), ValidationError);
  }
  SUBCASE("overlapping spans") {
    CHECK_THROWS_AS(parse_corpus(one_record(0, 1, 1, 2)), ValidationError);
  }
  SUBCASE("adjacent spans are fine") {
    CHECK(parse_corpus(one_record(0, 0, 1, 2)).size() == 1);
  }
}

TEST_CASE("duplicate ids and unknown labels are validation errors") {
  std::string two = one_record(0, 0, 2, 2, "x");
  two.pop_back();
  two += "," + one_record(0, 0, 2, 2, "x").substr(1);
  CHECK_THROWS_AS(parse_corpus(two), ValidationError);

  const std::string fake = R"([{"id": "f", "relation": "org:fake",
      "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1,
      "obj_end": 1, "subj_type": "ORGANIZATION", "obj_type": "PERSON"}])";
  CHECK_THROWS_AS(parse_corpus(fake), ValidationError);
  LoadOptions inferred;
  inferred.infer_labels = true;
  CHECK(parse_corpus(fake, std::nullopt, inferred).label_set().contains(
      "org:fake"));
}

TEST_CASE("malformed JSON reports the line") {
  const std::string text = "[\n  {\"id\": \"a\",\n  oops\n]";
  try {
    parse_corpus(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_corpus(R"({"id": "a"})"), ParseError);
  try {
    parse_corpus(R"([{"id": "a", "token": "abc"}])");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("record 0") != std::string::npos);
  }
}

TEST_CASE("links file populates links and filter_linked keeps full links") {
  // Five examples, two of them only partially linked.
  const std::string data = R"([
    {"id": "l1", "relation": "no_relation", "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1, "obj_end": 1, "subj_type": "PERSON", "obj_type": "CITY"},
    {"id": "l2", "relation": "no_relation", "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1, "obj_end": 1, "subj_type": "PERSON", "obj_type": "CITY"},
    {"id": "l3", "relation": "no_relation", "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1, "obj_end": 1, "subj_type": "PERSON", "obj_type": "CITY"},
    {"id": "l4", "relation": "no_relation", "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1, "obj_end": 1, "subj_type": "PERSON", "obj_type": "CITY"},
    {"id": "l5", "relation": "no_relation", "token": ["a", "b"], "subj_start": 0, "subj_end": 0, "obj_start": 1, "obj_end": 1, "subj_type": "PERSON", "obj_type": "CITY"}
  ])";
  const std::string links = R"({
    "l1": {"subj": "Q1", "obj": "Q2"},
    "l2": {"subj": null, "obj": "Q2"},
    "l3": {"subj": "Q3", "obj": "Q4"},
    "l4": {"subj": "Q5"},
    "l5": {"subj": "Q6", "obj": "Q7"},
    "elsewhere": {"subj": "Q8", "obj": "Q9"}
  })";
  const Corpus c = parse_corpus(data, links);
  CHECK(c.examples()[0].subj_link == "Q1");
  CHECK_FALSE(c.examples()[1].subj_link.has_value());
  CHECK_FALSE(c.examples()[3].obj_link.has_value());

  const Corpus f = filter_linked(c);
  REQUIRE(f.size() == 3);
  CHECK(f.examples()[0].id == "l1");
  CHECK(f.examples()[1].id == "l3");
  CHECK(f.examples()[2].id == "l5");
  CHECK(filter_linked(f) == f);

  CHECK_THROWS_AS(parse_corpus(data, std::string_view("[1]")), ParseError);
}

TEST_CASE("filter_linked is the identity on a fully linked corpus") {
  const Corpus g = testing::gallery_corpus();
  CHECK(filter_linked(g) == g);
  CHECK(filter_linked(Corpus{}).empty());
}

TEST_CASE("write then load restores every field") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "readv_corpus_test";
  std::filesystem::create_directories(dir);

  SUBCASE("empty corpus is an empty array") {
    write_corpus(Corpus{}, dir / "empty.json");
    CHECK(nlohmann::json::parse(read_file(dir / "empty.json")) ==
          nlohmann::json::array());
    CHECK(load_corpus(dir / "empty.json").empty());
  }
  SUBCASE("masked entity keeps NONE type") {
    std::vector<Example> ex = {make_example("m", {"[MASK]", "painted", "it"},
                                            {0, 0}, {2, 2}, "NONE", "ARTWORK",
                                            "no_relation")};
    write_corpus(Corpus(ex, tacred_labels()), dir / "masked.json");
    const auto records = nlohmann::json::parse(read_file(dir / "masked.json"));
    CHECK(records[0]["subj_type"] == "NONE");
    CHECK(records[0]["token"][0] == "[MASK]");
  }
  SUBCASE("real records with extras and links") {
    const Corpus c = parse_corpus(kThreeRecords,
                                  std::string_view(R"({"a1": {"subj": "Q1", "obj": null}})"));
    write_corpus(c, dir / "three.json");
    const Corpus back = load_corpus(dir / "three.json");
    CHECK(back == c);
    CHECK(back.examples()[0].subj_link == "Q1");
    CHECK(back.examples()[0].extra["stanford_pos"].size() == 5);
  }
  SUBCASE("links file round trip") {
    const Corpus g = testing::gallery_corpus();
    LoadOptions opts;
    opts.labels = testing::gallery_labels();
    Corpus unlinked_copy = parse_corpus(corpus_to_json(g), links_to_json(g), opts);
    CHECK(unlinked_copy == g);
  }
}

TEST_CASE("round trip property over random corpora") {
  std::mt19937_64 rng(20240101);
  testing::RandomCorpusSpec spec;
  spec.linked = false;
  spec.extras = true;
  for (int trial = 0; trial < 50; ++trial) {
    const Corpus c = testing::random_corpus(rng, spec);
    LoadOptions opts;
    opts.labels = c.label_set();
    CHECK(parse_corpus(corpus_to_json(c), std::nullopt, opts) == c);
  }
}

}  // namespace
}  // namespace readv
