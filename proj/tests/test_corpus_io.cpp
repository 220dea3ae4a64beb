// Copyright 2026 The radsum Authors.
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

#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "radsum/corpus_io.hpp"
#include "radsum/error.hpp"
#include "radsum/file_util.hpp"
#include "test_support.hpp"

namespace radsum {
namespace {

using testing::CodeOf;
using testing::TempDir;

std::vector<Json> Corpus(std::size_t n) {
  std::vector<Json> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(RetrainJson("r" + std::to_string(i),
                              "report number " + std::to_string(i) + " low lung volumes"));
  }
  return out;
}

std::set<std::string> Ids(const std::vector<Json>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.at("id").get<std::string>());
  return out;
}

TEST_CASE("split 70/20/10") {
  const auto corpus = Corpus(100);
  const auto result = SplitDataset(corpus, SplitSpec::Parse("train=70,val=20,test=10", 7));
  REQUIRE(result.splits.size() == 3);
  CHECK(result.splits[0].size() == 70);
  CHECK(result.splits[1].size() == 20);
  CHECK(result.splits[2].size() == 10);
  CHECK(result.manifest.splits[0].name == "train");
  CHECK(result.manifest.splits[2].count == 10);

  std::set<std::string> seen;
  for (const auto& split : result.splits) {
    for (const auto& id : Ids(split)) CHECK(seen.insert(id).second);
  }
  CHECK(seen == Ids(corpus));

  std::vector<NamedSplit> named;
  for (std::size_t i = 0; i < result.splits.size(); ++i) {
    named.emplace_back(result.manifest.splits[i].name, result.splits[i]);
  }
  CHECK(VerifyDisjoint(named).clean());

  // A different seed changes the assignment but not the sizes.
  const auto other = SplitDataset(corpus, SplitSpec::Parse("train=70,val=20,test=10", 8));
  CHECK(other.splits[0].size() == 70);
  CHECK(Ids(other.splits[2]) != Ids(result.splits[2]));
}

TEST_CASE("split ratios use floor") {
  const auto result = SplitDataset(Corpus(99), SplitSpec::Parse("train=0.8,val=0.1,test=0.1", 1));
  CHECK(result.splits[0].size() == 79);
  CHECK(result.splits[1].size() == 9);
  CHECK(result.splits[2].size() == 9);
}

TEST_CASE("split errors") {
  const auto corpus = Corpus(100);
  CHECK(CodeOf([&] { SplitDataset(corpus, SplitSpec::Parse("train=90,test=20", 0)); }) ==
        ErrorCode::kInsufficientRecords);
  CHECK(CodeOf([&] { SplitDataset(corpus, SplitSpec::Parse("train=70,train=10", 0)); }) ==
        ErrorCode::kInvalidSplitSpec);
  CHECK(CodeOf([&] { SplitDataset(corpus, SplitSpec::Parse("train=0.8,test=0.3", 0)); }) ==
        ErrorCode::kInvalidSplitSpec);
  CHECK(CodeOf([&] { SplitDataset(corpus, SplitSpec{}); }) == ErrorCode::kInvalidSplitSpec);
  CHECK(CodeOf([] { SplitSpec::Parse("train", 0); }) == ErrorCode::kInvalidSplitSpec);
  CHECK(CodeOf([] { SplitSpec::Parse("", 0); }) == ErrorCode::kInvalidSplitSpec);
  CHECK(CodeOf([] { SplitSpec::Parse("train=abc", 0); }) == ErrorCode::kInvalidSplitSpec);

  auto dup = corpus;
  dup.push_back(RetrainJson("r5", "something else entirely"));
  CHECK(CodeOf([&] { SplitDataset(dup, SplitSpec::Parse("a=10", 0)); }) ==
        ErrorCode::kDuplicateId);
}

TEST_CASE("split drops near-duplicates before assignment") {
  auto corpus = Corpus(50);
  corpus.push_back(RetrainJson("copy", "REPORT   number 3 low lung volumes"));
  const auto result = SplitDataset(corpus, SplitSpec::Parse("a=25,b=25", 3));
  CHECK(result.manifest.near_duplicates_dropped == 1);
  std::set<std::string> all;
  for (const auto& s : result.splits) {
    const auto ids = Ids(s);
    all.insert(ids.begin(), ids.end());
  }
  CHECK(all.count("copy") == 0);
  CHECK(all.count("r3") == 1);
}

TEST_CASE("written splits are byte-identical across runs") {
  TempDir a, b;
  const auto corpus = Corpus(100);
  const auto spec = SplitSpec::Parse("train=70,val=20,test=10", 7);
  WriteSplits(SplitDataset(corpus, spec), a.path());
  WriteSplits(SplitDataset(corpus, spec), b.path());
  for (const char* name : {"train.jsonl", "val.jsonl", "test.jsonl", "train.ids", "test.ids",
                           "manifest.json"}) {
    CHECK_MESSAGE(ReadFile(a / name) == ReadFile(b / name), name);
  }
  const auto manifest = Json::parse(ReadFile(a / "manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["splits"][0]["count"] == 70);
  CHECK(manifest["splits"][0]["sha256"].get<std::string>().size() == 64);

  const auto report = VerifyDisjointFiles({a / "train.jsonl", a / "val.jsonl", a / "test.jsonl"});
  CHECK(report.clean());
}

TEST_CASE("verify_disjoint finds planted overlaps") {
  const auto corpus = Corpus(30);
  const std::vector<Json> train(corpus.begin(), corpus.begin() + 20);
  std::vector<Json> test(corpus.begin() + 20, corpus.end());

  CHECK(VerifyDisjoint({{"train", train}, {"test", test}}).clean());

  SUBCASE("exact copy") {
    test.push_back(train[4]);
    const auto report = VerifyDisjoint({{"train", train}, {"test", test}});
    CHECK(report.text_collisions.size() == 1);
    CHECK(report.id_collisions.size() == 1);
    CHECK(report.id_collisions[0].key == "r4");
  }
  SUBCASE("whitespace and case variant under a new id") {
    test.push_back(RetrainJson("fresh", "  Report Number 4\tLOW lung  volumes "));
    const auto report = VerifyDisjoint({{"train", train}, {"test", test}});
    CHECK(report.text_collisions.size() == 1);
    CHECK(report.id_collisions.empty());
    CHECK(report.text_collisions[0].id_a == "r4");
    CHECK(report.text_collisions[0].id_b == "fresh");
  }
  SUBCASE("mixed schemas") {
    test.push_back(PairJson({"p", "input", "target"}));
    CHECK(CodeOf([&] { VerifyDisjoint({{"train", train}, {"test", test}}); }) ==
          ErrorCode::kSchemaMismatch);
  }
}

TEST_CASE("canonical JSONL round trip") {
  TempDir dir;
  MaskedExample ex;
  ex.id = "m1";
  ex.input_ids = {10, kMaskId, 12};
  ex.mask_positions = {1};
  ex.originals = {11};
  ex.branches = {MaskBranch::kMask};
  const std::vector<Json> records = {
      RetrainJson("a", "text with \"quotes\" and \\ slashes"),
      PairJson({"b", "History. Findings.", "Impression."}),
      MaskedExampleJson(ex),
  };
  WriteJsonl(dir / "c.jsonl", records);
  const std::string bytes = ReadFile(dir / "c.jsonl");
  CHECK(bytes.back() == '\n');
  CHECK(bytes.find(": ") == std::string::npos);
  const auto back = ReadJsonl(dir / "c.jsonl");
  CHECK(DumpJsonl(back) == bytes);
  CHECK(back[1].begin().key() == "id");
  CHECK(std::next(back[1].begin()).key() == "input");
  CHECK(bytes.find("{\"id\":\"m1\",\"input_ids\":[10,4,12],\"mask_positions\":[1],"
                   "\"originals\":[11]") != std::string::npos);

  const auto restored = MaskedExampleFromJson(back[2]);
  CHECK(restored.input_ids == ex.input_ids);
  CHECK(restored.Restore() == std::vector<TokenId>{10, 11, 12});
}

TEST_CASE("JSONL read errors") {
  TempDir dir;
  std::ofstream(dir / "bad.jsonl") << "{\"id\":\"a\"}\n{broken\n";
  const auto err = CodeOf([&] { ReadJsonl(dir / "bad.jsonl"); });
  CHECK(err == ErrorCode::kParseError);
  try {
    ReadJsonl(dir / "bad.jsonl");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  CHECK(CodeOf([&] { ReadJsonl(dir / "missing.jsonl"); }) == ErrorCode::kIoError);
  CHECK(CodeOf([] { StringField(Json{{"id", 3}}, "id"); }) == ErrorCode::kSchemaMismatch);
  CHECK(CodeOf([] { MaskedExampleFromJson(Json{{"id", "x"}, {"input_ids", {1}}}); }) ==
        ErrorCode::kSchemaMismatch);
  CHECK(ParseJsonl("\n{\"id\":\"a\"}\n\n").size() == 1);
}

TEST_CASE("near-duplicate key normalization") {
  CHECK(NormalizedRecordText(RetrainJson("x", "  Low\n LUNG   volumes ")) == "low lung volumes");
  CHECK(NearDuplicateKey(PairJson({"a", "In", "Out"})) ==
        NearDuplicateKey(PairJson({"b", "in ", " OUT"})));
  CHECK(NearDuplicateKey(RetrainJson("a", "one")) != NearDuplicateKey(RetrainJson("a", "two")));
}

}  // namespace
}  // namespace radsum
